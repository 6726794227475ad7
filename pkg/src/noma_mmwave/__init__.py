"""Outage analysis of two-user NOMA mmWave links at a road intersection
under Poisson interference, with a Monte Carlo cross-check."""

from .errors import DomainError, NumericalIntegrityError, ValidationError
from .laplace import (
    InterferenceSpec, LaplaceEval, complete_bell, exponent_g, exponent_g_derivative,
    laplace_with_derivatives, paper_derivative_formula,
)
from .montecarlo import McEstimate, Realization, run_mc, run_mc_schemes
from .outage import (
    OutageBreakdown, Thresholds, inner_term, outage_d1, outage_d2, outage_oma, thresholds,
)
from .scenario import (
    Antenna, LinkState, Noma, Placement, Propagation, RoadAxis, RoadLayout, Scenario, Traffic,
    force_link_states, los_probability, placement_from_cartesian, upsilon,
)

__version__ = "0.1.0"
