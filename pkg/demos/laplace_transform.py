"""Walk through the interference transform on a single road.

Run: python demos/laplace_transform.py
"""

import math

from noma_mmwave.laplace import (
    InterferenceSpec, exponent_g, laplace_with_derivatives, paper_derivative_formula,
)
from noma_mmwave.scenario import LinkState, Placement, RoadAxis

# A receiver 10 m from the X road, interferers at 0.01 per metre, all transmitting.
rx = Placement(10.0, math.pi / 2)
los = InterferenceSpec(RoadAxis.X, LinkState.LOS, rx, 0.01, alpha=2.0)
nlos = InterferenceSpec(RoadAxis.X, LinkState.NLOS, rx, 0.01, alpha=4.0)

print("s        L_los(s)   closed-form check   L_nlos(s)")
for s in (1.0, 10.0, 100.0, 1e3, 1e4):
    closed = math.exp(-0.01 * math.pi * s / math.sqrt(100.0 + s))
    print(f"{s:<8g} {math.exp(exponent_g(los, s)):.6f}   {closed:.6f}            "
          f"{math.exp(exponent_g(nlos, s)):.6f}")

# Derivatives come from complete Bell polynomials of the exponent's derivatives.
# The shortcut [g']^n exp(g) agrees only at first order; the gap at second
# order is exactly exp(g) g''.
s = 250.0
exact = laplace_with_derivatives(los, s, 4)
print("\norder  exact derivative     shortcut")
for n in range(5):
    print(f"{n:<6d} {exact[n]: .6e}      {paper_derivative_formula(los, s, n): .6e}")
