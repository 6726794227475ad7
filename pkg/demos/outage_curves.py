"""Outage at both destinations as traffic grows, for NOMA and the OMA baseline.

Run: python demos/outage_curves.py
"""

from noma_mmwave import LinkState, Scenario, Traffic, force_link_states, outage_d1, outage_d2, outage_oma

print("lam      D1 NOMA   D2 NOMA   D1 OMA    D2 OMA")
for lam in (1e-4, 5e-4, 1e-3, 5e-3, 1e-2):
    sc = Scenario(traffic=Traffic.uniform(lam))
    o1, o2 = outage_oma(sc)
    print(f"{lam:<8g} {outage_d1(sc).total:.4f}    {outage_d2(sc).total:.4f}    {o1:.4f}    {o2:.4f}")

# Where does the outage come from?  Split D1's success by the state of its own link.
sc = Scenario(traffic=Traffic.uniform(1e-3))
br = outage_d1(sc)
print(f"\nD1 at lam=1e-3: outage {br.total:.4f}")
for state, part in br.per_link_state.items():
    print(f"  P({state.value} link and decoded) = {part:.4f}"
          f"  (link in {state.value}: {sc.link_state_probability(1, state):.4f})")

# Forcing every link into one state.  At low traffic the all-LOS world beats
# the mixed one, because an NLOS signal against LOS interferers almost never
# gets through.
print("\nlam      mixed     all-LOS   all-NLOS  (D1)")
for lam in (1e-4, 1e-3, 1e-2):
    sc = Scenario(traffic=Traffic.uniform(lam))
    vals = [outage_d1(x).total for x in (sc, force_link_states(sc, LinkState.LOS),
                                         force_link_states(sc, LinkState.NLOS))]
    print(f"{lam:<8g} " + "    ".join(f"{v:.4f}" for v in vals))
