"""Laplace transform of road interference and its derivatives.

For interferers forming a homogeneous PPP on a line at perpendicular offset
``c`` from the receiver, with Aloha thinning ``p`` and unit-mean exponential
fading, the transform is ``L(s) = exp(g(s))`` with

    g(s) = -p * lam * integral over R of  s / (s + (c^2 + x^2)^(alpha/2))  dx.

Derivatives of ``L`` come from derivatives of ``g`` composed through the
complete Bell polynomials.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from scipy import integrate

from .errors import DomainError, ValidationError
from .scenario import LinkState, Placement, RoadAxis, perpendicular_offset

MAX_ORDER = 16
QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-13


@dataclass(frozen=True)
class InterferenceSpec:
    """One interferer population (road, link state) seen from one receiver.

    ``intensity`` is per lane; every lane in ``lane_offsets`` carries an
    independent PPP.  ``upsilon`` scales every interferer's received power.
    """

    axis: RoadAxis
    state: LinkState
    receiver: Placement
    intensity: float
    p: float = 1.0
    alpha: float = 2.0
    lane_offsets: tuple[float, ...] = (0.0,)
    upsilon: float = 1.0

    def __post_init__(self):
        if not (self.intensity >= 0 and math.isfinite(self.intensity)):
            raise ValidationError(f"intensity must be finite and >= 0, got {self.intensity}")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"access probability must lie in [0, 1], got {self.p}")
        if not self.upsilon > 0:
            raise ValidationError(f"upsilon must be > 0, got {self.upsilon}")
        if len(self.lane_offsets) == 0:
            raise ValidationError("at least one lane is required")
        object.__setattr__(self, "lane_offsets", tuple(float(o) for o in self.lane_offsets))

    @property
    def active_density(self) -> float:
        return self.p * self.intensity

    def perpendicular_offsets(self) -> list[float]:
        return [perpendicular_offset(self.receiver, self.axis, o) for o in self.lane_offsets]


@dataclass(frozen=True)
class LaplaceEval:
    """``values[n]`` is the n-th derivative of the transform at ``s``."""

    s: float
    values: tuple[float, ...]

    @property
    def max_order(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> float:
        return self.values[n]


def integrate_real_line(f, center: float = 0.0, scale: float = 1.0,
                        epsabs: float = QUAD_EPSABS, epsrel: float = QUAD_EPSREL) -> float:
    """Integral of ``f`` over the real line via ``x = center + scale*tan(u)``.

    ``f`` must decay at least like ``1/x**2``.
    """

    def h(u):
        cu = math.cos(u)
        return f(center + scale * math.tan(u)) * scale / (cu * cu)

    half = math.pi / 2
    lo, _ = integrate.quad(h, -half, 0.0, epsabs=epsabs, epsrel=epsrel, limit=200)
    hi, _ = integrate.quad(h, 0.0, half, epsabs=epsabs, epsrel=epsrel, limit=200)
    return lo + hi


def kernel_integral(c: float, s: float, alpha: float, order: int = 0,
                    epsabs: float = QUAD_EPSABS, epsrel: float = QUAD_EPSREL) -> float:
    """Integral over the line of the order-``order`` kernel.

    With ``U = (c^2 + x^2)^(alpha/2)`` the kernels are ``s/(s+U)`` for order 0
    and ``U/(s+U)^(order+1)`` above.  The map ``x = L tan(u)`` turns the
    semi-infinite range into [0, pi/2); the integrand is rewritten in terms of
    ``cos(u)`` so it stays finite at the endpoint.
    """
    c = abs(c)
    scale = max(s ** (1.0 / alpha), c)
    c2, l2 = c * c, scale * scale
    half_alpha = alpha / 2.0

    if order == 0:
        def h(u):
            cu, su = math.cos(u), math.sin(u)
            w = c2 * cu * cu + l2 * su * su
            cua = cu**alpha
            return s * scale * cu ** (alpha - 2.0) / (s * cua + w**half_alpha)
    else:
        power = alpha * order - 2.0

        def h(u):
            cu, su = math.cos(u), math.sin(u)
            w = c2 * cu * cu + l2 * su * su
            wa = w**half_alpha
            return scale * wa * cu**power / (s * cu**alpha + wa) ** (order + 1)

    val, _ = integrate.quad(h, 0.0, math.pi / 2, epsabs=epsabs, epsrel=epsrel, limit=200)
    return 2.0 * val


def _falling(a: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= a - i
    return out


def closed_form_alpha2(c: float, s: float, order: int = 0) -> float:
    """``d^j/ds^j [s / sqrt(c^2 + s)]``; times ``pi`` this is the alpha=2 line integral."""
    q = c * c + s
    if order == 0:
        return s / math.sqrt(q)
    # s/sqrt(q) = q^(1/2) - c^2 q^(-1/2); both terms share a sign for j >= 1
    return _falling(0.5, order) * q ** (0.5 - order) - c * c * _falling(-0.5, order) * q ** (-0.5 - order)


def _check(spec: InterferenceSpec, s: float):
    if not (s > 0 and math.isfinite(s)):
        raise ValidationError(f"transform argument must be finite and > 0, got {s}")
    if spec.alpha < 2.0 and spec.active_density > 0:
        raise DomainError(f"interference integral diverges for alpha={spec.alpha} < 2")


def _base_derivative(spec: InterferenceSpec, s: float, order: int, method: str) -> float:
    """Derivative of the exponent for an interferer population without the
    ``upsilon`` scaling."""
    if spec.active_density == 0.0:
        return 0.0
    use_closed = spec.alpha == 2.0 and method != "quadrature"
    if method == "closed" and spec.alpha != 2.0:
        raise ValueError("closed form exists only for alpha = 2")
    total = 0.0
    for c in spec.perpendicular_offsets():
        if use_closed:
            total += math.pi * closed_form_alpha2(c, s, order)
        else:
            k = kernel_integral(c, s, spec.alpha, order)
            if order > 0:
                k *= (-1) ** (order + 1) * math.factorial(order)
            total += k
    return -spec.active_density * total


def exponent_g(spec: InterferenceSpec, s: float, method: str = "auto") -> float:
    """log of the Laplace transform at ``s``.

    ``method`` is ``"auto"`` (closed form when alpha = 2), ``"quadrature"``
    or ``"closed"``.
    """
    _check(spec, s)
    return _base_derivative(spec, spec.upsilon * s, 0, method)


def exponent_g_derivative(spec: InterferenceSpec, s: float, order: int, method: str = "auto") -> float:
    _check(spec, s)
    if order < 1:
        raise ValidationError(f"derivative order must be >= 1, got {order}")
    return spec.upsilon**order * _base_derivative(spec, spec.upsilon * s, order, method)


def complete_bell(x: Sequence[float]) -> list[float]:
    """Complete Bell polynomials B_0..B_N evaluated at x[0..N-1] = (x_1..x_N)."""
    n_max = len(x)
    b = [1.0]
    for n in range(n_max):
        b.append(sum(math.comb(n, k) * b[n - k] * x[k] for k in range(n + 1)))
    return b


def _as_specs(spec) -> list[InterferenceSpec]:
    if isinstance(spec, InterferenceSpec):
        return [spec]
    return list(spec)


def exponent_stack(spec: InterferenceSpec | Iterable[InterferenceSpec], s: float, max_order: int,
                   method: str = "auto") -> list[float]:
    """[g, g', ..., g^(N)] summed over one or more independent populations."""
    specs = _as_specs(spec)
    out = [0.0] * (max_order + 1)
    for sp in specs:
        out[0] += exponent_g(sp, s, method)
        for j in range(1, max_order + 1):
            out[j] += exponent_g_derivative(sp, s, j, method)
    return out


def laplace_with_derivatives(spec: InterferenceSpec | Iterable[InterferenceSpec], s: float,
                             max_order: int, method: str = "auto") -> LaplaceEval:
    """Transform and its first ``max_order`` derivatives at ``s``.

    Passing several specs gives the transform of their summed interference.
    """
    if not 0 <= max_order <= MAX_ORDER:
        raise ValidationError(f"derivative order must lie in [0, {MAX_ORDER}], got {max_order}")
    specs = _as_specs(spec)
    if not specs:
        raise ValidationError("at least one interference spec is required")
    g = exponent_stack(specs, s, max_order, method)
    lval = math.exp(g[0])
    if lval == 0.0:
        return LaplaceEval(s, tuple([0.0] * (max_order + 1)))
    bell = complete_bell(g[1:])
    return LaplaceEval(s, tuple(lval * b for b in bell))


def paper_derivative_formula(spec: InterferenceSpec, s: float, order: int, method: str = "auto") -> float:
    """``g'(s)**order * exp(g(s))``.

    Equals the true derivative only for order 0 and 1; it drops every term
    involving g'' and higher.  Kept for comparison only.
    """
    _check(spec, s)
    g0 = exponent_g(spec, s, method)
    if order == 0:
        return math.exp(g0)
    return exponent_g_derivative(spec, s, 1, method) ** order * math.exp(g0)


def interference_specs(sc, receiver_index: int, state: LinkState, axis: RoadAxis,
                       with_upsilon: bool = True) -> InterferenceSpec:
    """The population of ``state`` interferers on road ``axis`` at destination ``receiver_index``."""
    prop, traffic = sc.propagation, sc.traffic
    return InterferenceSpec(
        axis=axis,
        state=state,
        receiver=sc.destination(receiver_index),
        intensity=traffic.intensity(axis, state),
        p=traffic.p,
        alpha=prop.alpha(state),
        lane_offsets=sc.layout.lane_offsets(axis),
        upsilon=sc.upsilon if with_upsilon else 1.0,
    )

