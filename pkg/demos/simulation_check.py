"""Compare the closed-form outage against a direct simulation of the road network.

Run: python demos/simulation_check.py   (about half a minute)
"""

from noma_mmwave import Scenario, Traffic, outage_d1, outage_d2, outage_oma, run_mc_schemes
from noma_mmwave.scenario import placement_from_cartesian

trials = 5000
cases = {
    "defaults": Scenario(traffic=Traffic.uniform(1e-3)),
    "near the crossing": Scenario(source=placement_from_cartesian(20, 5), d1=placement_from_cartesian(40, 8),
                                  d2=placement_from_cartesian(35, -6), traffic=Traffic.uniform(5e-3)),
}
for name, sc in cases.items():
    mc = run_mc_schemes(sc, trials=trials, seed=1)
    analytic = {"NOMA": (outage_d1(sc).total, outage_d2(sc).total), "OMA": outage_oma(sc)}
    print(f"{name}:")
    for scheme in ("NOMA", "OMA"):
        for i in (0, 1):
            est = mc[scheme][i]
            print(f"  {scheme:<4} D{i + 1}  analytic {analytic[scheme][i]:.4f}   "
                  f"simulated {est.mean:.4f} +/- {est.std_err:.4f}")
