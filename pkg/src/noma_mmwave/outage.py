"""Closed-form outage probabilities for the two NOMA destinations and the
OMA baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericalIntegrityError
from .laplace import interference_specs, laplace_with_derivatives
from .scenario import LinkState, Noma, RoadAxis, Scenario, sir_threshold

STATES = (LinkState.LOS, LinkState.NLOS)
INTEGRITY_SLACK = 1e-9


@dataclass(frozen=True)
class Thresholds:
    theta1: float
    theta2: float
    psi1: float
    psi2: float
    psi_max: float
    feasible: bool


def thresholds(noma: Noma) -> Thresholds:
    """SIR thresholds and their SIC-adjusted ratios.

    When ``theta1 >= a1/a2`` the first message can never be decoded; this is
    flagged with ``feasible=False`` and ``psi1 = psi_max = inf``.
    """
    t1, t2 = noma.theta1, noma.theta2
    psi2 = t2 / noma.a2
    feasible = t1 < noma.a1 / noma.a2
    psi1 = t1 / (noma.a1 - t1 * noma.a2) if feasible else math.inf
    return Thresholds(t1, t2, psi1, psi2, max(psi1, psi2), feasible)


@dataclass(frozen=True)
class OutageBreakdown:
    """``total = 1 - sum(per_link_state.values())``; each entry is the
    probability of the S-D link being in that state *and* decoding."""

    total: float
    per_link_state: dict

    def __float__(self):
        return self.total


def nakagami_power_ccdf(x: float, m: int, mu: float = 1.0) -> float:
    """P(|h|^2 > x) for Gamma(m, mu/m) power, integer ``m``, via the finite exponential sum."""
    y = m * x / mu
    term, acc = 1.0, 1.0
    for k in range(1, m):
        term *= y / k
        acc += term
    return math.exp(-y) * acc


def inner_term(spec_x, spec_y, m: int, s_base: float, method: str = "auto") -> float:
    """E[ Gamma(m, s (I_x + I_y)) / Gamma(m) ] for independent interference
    from the two roads, written with transform derivatives at ``s_base``.

    ``spec_x`` / ``spec_y`` may each be one spec or a sequence of specs whose
    interference adds up.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    lx = laplace_with_derivatives(spec_x, s_base, m - 1, method)
    ly = laplace_with_derivatives(spec_y, s_base, m - 1, method)
    total = 0.0
    coeff = 1.0
    for k in range(m):
        if k:
            coeff *= -s_base / k
        cross = sum(math.comb(k, n) * lx[k - n] * ly[n] for n in range(k + 1))
        total += coeff * cross
    return total


def laplace_argument(sc: Scenario, i: int, state: LinkState, psi: float) -> float:
    """m * psi / (mu * r^-alpha * upsilon), evaluated in log space."""
    prop = sc.propagation
    r = sc.r_sd1 if i == 1 else sc.r_sd2
    m = prop.m(state)
    return math.exp(math.log(m * psi) + prop.alpha(state) * math.log(r)
                    - math.log(prop.mu) - math.log(sc.upsilon))


def success_given_state(sc: Scenario, i: int, state: LinkState, psi: float,
                        coupling: str = "product", method: str = "auto") -> float:
    """P(|h|^2 >= psi * r^alpha * I / upsilon | S-D_i link in ``state``).

    ``coupling="product"`` multiplies the LOS-population and NLOS-population
    factors; this is exact only for m = 1.  ``coupling="exact"`` treats the
    four populations as one sum.
    """
    if psi == 0.0:
        return 1.0
    m = sc.propagation.m(state)
    omega = laplace_argument(sc, i, state, psi)
    per = {k: (interference_specs(sc, i, k, RoadAxis.X), interference_specs(sc, i, k, RoadAxis.Y))
           for k in STATES}
    if coupling == "product":
        out = 1.0
        for k in STATES:
            out *= inner_term(per[k][0], per[k][1], m, omega, method)
        return out
    if coupling == "exact":
        xs = [per[k][0] for k in STATES]
        ys = [per[k][1] for k in STATES]
        return inner_term(xs, ys, m, omega, method)
    raise ValueError(f"unknown coupling {coupling!r}")


def _breakdown(sc: Scenario, i: int, psi: float, coupling: str, method: str) -> OutageBreakdown:
    if math.isinf(psi):
        return OutageBreakdown(1.0, {s: 0.0 for s in STATES})
    parts = {}
    for state in STATES:
        pz = sc.link_state_probability(i, state)
        parts[state] = 0.0 if pz == 0.0 else pz * success_given_state(sc, i, state, psi, coupling, method)
    raw = 1.0 - sum(parts.values())
    if not -INTEGRITY_SLACK <= raw <= 1.0 + INTEGRITY_SLACK:
        raise NumericalIntegrityError(f"outage at D{i} evaluated to {raw!r}")
    return OutageBreakdown(min(max(raw, 0.0), 1.0), parts)


def outage_d1(sc: Scenario, coupling: str = "product", method: str = "auto") -> OutageBreakdown:
    return _breakdown(sc, 1, thresholds(sc.noma).psi1, coupling, method)


def outage_d2(sc: Scenario, coupling: str = "product", method: str = "auto") -> OutageBreakdown:
    th = thresholds(sc.noma)
    return _breakdown(sc, 2, th.psi_max, coupling, method)


def oma_thresholds(noma: Noma) -> tuple[float, float]:
    if noma.oma_convention == "half":
        return 2.0**noma.r1 - 1.0, 2.0**noma.r2 - 1.0
    return sir_threshold(noma.r1), sir_threshold(noma.r2)


def outage_oma(sc: Scenario, coupling: str = "product", method: str = "auto") -> tuple[float, float]:
    """Each destination alone in its own slot at full power."""
    t1, t2 = oma_thresholds(sc.noma)
    return (_breakdown(sc, 1, t1, coupling, method).total,
            _breakdown(sc, 2, t2, coupling, method).total)
