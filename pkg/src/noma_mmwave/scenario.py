"""Model parameters and the deterministic geometry shared by the analytic
engine and the simulator.

Coordinates: the X road is the horizontal axis, the Y road the vertical one,
and the intersection sits at the origin.  All gains are linear internally.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from scipy.constants import c as SPEED_OF_LIGHT

from .errors import ValidationError

TWO_PI = 2.0 * math.pi


class LinkState(enum.Enum):
    LOS = "LOS"
    NLOS = "NLOS"


class RoadAxis(enum.Enum):
    X = "X"
    Y = "Y"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class Placement:
    """Polar position of a node: distance ``d`` to the intersection and
    angle ``theta`` to the X road."""

    d: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.d) and math.isfinite(self.theta)):
            raise ValidationError(f"placement must be finite, got d={self.d}, theta={self.theta}")
        if self.d < 0:
            raise ValidationError(f"distance must be >= 0, got {self.d}")

    @property
    def x(self) -> float:
        return self.d * math.cos(self.theta)

    @property
    def y(self) -> float:
        return self.d * math.sin(self.theta)

    def cartesian(self) -> tuple[float, float]:
        return self.x, self.y


def placement_from_cartesian(x: float, y: float) -> Placement:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValidationError(f"coordinates must be finite, got ({x}, {y})")
    d = math.hypot(x, y)
    if d == 0.0:
        return Placement(0.0, 0.0)
    theta = math.atan2(y, x) % TWO_PI
    # atan2 of a tiny negative y can round up to exactly 2*pi
    if theta >= TWO_PI:
        theta = 0.0
    return Placement(d, theta)


def distance(a: Placement, b: Placement) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def dist_to_x_road_point(p: Placement, x: float, lane_offset: float = 0.0) -> float:
    """Distance from ``p`` to the point at abscissa ``x`` on an X-road lane
    shifted by ``lane_offset`` along Y."""
    return math.hypot(p.d * math.sin(p.theta) - lane_offset, x - p.d * math.cos(p.theta))


def dist_to_y_road_point(p: Placement, y: float, lane_offset: float = 0.0) -> float:
    """Distance from ``p`` to the point at ordinate ``y`` on a Y-road lane
    shifted by ``lane_offset`` along X."""
    return math.hypot(p.d * math.cos(p.theta) - lane_offset, y - p.d * math.sin(p.theta))


def perpendicular_offset(p: Placement, axis: RoadAxis, lane_offset: float = 0.0) -> float:
    """Distance from ``p`` to the (infinite) lane line."""
    if axis is RoadAxis.X:
        return abs(p.d * math.sin(p.theta) - lane_offset)
    return abs(p.d * math.cos(p.theta) - lane_offset)


def los_probability(r: float, beta: float) -> float:
    """Probability that a link of length ``r`` is line-of-sight."""
    if r < 0 or beta < 0:
        raise ValidationError(f"need r >= 0 and beta >= 0, got r={r}, beta={beta}")
    if r == 0.0:
        return 1.0
    return math.exp(-beta * r)


@dataclass(frozen=True)
class Propagation:
    alpha_los: float = 2.0
    alpha_nlos: float = 4.0
    m_los: int = 2
    m_nlos: int = 1
    mu: float = 1.0
    beta: float = 9.5e-3

    def __post_init__(self):
        for name in ("m_los", "m_nlos"):
            m = getattr(self, name)
            if isinstance(m, bool) or not isinstance(m, int):
                if isinstance(m, float) and m.is_integer():
                    object.__setattr__(self, name, int(m))
                else:
                    raise ValidationError(f"{name} must be an integer, got {m!r}")
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1, got {m}")
        for name in ("alpha_los", "alpha_nlos"):
            if not getattr(self, name) >= 2.0:
                raise ValidationError(f"{name} must be >= 2 for a finite interference integral")
        if not self.mu > 0:
            raise ValidationError(f"mu must be > 0, got {self.mu}")
        if not self.beta >= 0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")

    def alpha(self, state: LinkState) -> float:
        return self.alpha_los if state is LinkState.LOS else self.alpha_nlos

    def m(self, state: LinkState) -> int:
        return self.m_los if state is LinkState.LOS else self.m_nlos


@dataclass(frozen=True)
class Antenna:
    """Two-level sector antenna.  Gains are linear."""

    g_max: float = db_to_linear(18.0)
    g_min: float = db_to_linear(-10.0)
    phi: float = math.pi / 6
    carrier_freq: float = 30e9

    def __post_init__(self):
        if not (self.g_max >= self.g_min > 0):
            raise ValidationError(f"need g_max >= g_min > 0, got {self.g_max}, {self.g_min}")
        if not self.phi > 0:
            raise ValidationError(f"beamwidth must be > 0, got {self.phi}")
        if not self.carrier_freq > 0:
            raise ValidationError(f"carrier frequency must be > 0, got {self.carrier_freq}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq


def antenna_gain(omega: float, a: Antenna) -> float:
    folded = math.remainder(omega, TWO_PI)
    return a.g_max if abs(folded) <= a.phi / 2 else a.g_min


def upsilon(a: Antenna) -> float:
    """Common link-budget factor: aligned-beam gain times the 1 m free-space loss."""
    return a.g_max**2 * a.wavelength**2 / (4 * math.pi) ** 2


@dataclass(frozen=True)
class Traffic:
    """Interferer intensities per road and link state (vehicles per metre,
    per lane) and the Aloha access probability."""

    lam_x_los: float = 0.01
    lam_x_nlos: float = 0.01
    lam_y_los: float = 0.01
    lam_y_nlos: float = 0.01
    p: float = 1.0

    def __post_init__(self):
        for name in ("lam_x_los", "lam_x_nlos", "lam_y_los", "lam_y_nlos"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"access probability must lie in [0, 1], got {self.p}")

    @classmethod
    def uniform(cls, lam: float, p: float = 1.0) -> Traffic:
        return cls(lam, lam, lam, lam, p)

    def intensity(self, axis: RoadAxis, state: LinkState) -> float:
        return getattr(self, f"lam_{axis.value.lower()}_{state.value.lower()}")


@dataclass(frozen=True)
class Noma:
    a1: float = 0.9
    a2: float = 0.1
    r1: float = 0.5
    r2: float = 0.5
    # OMA threshold convention: "full" uses 2**(2r) - 1 like NOMA, "half" uses 2**r - 1
    oma_convention: str = "full"

    def __post_init__(self):
        if abs(self.a1 + self.a2 - 1.0) > 1e-12:
            raise ValidationError(f"a1 + a2 must equal 1, got {self.a1} + {self.a2}")
        if not (self.a1 >= self.a2 > 0):
            raise ValidationError(f"need a1 >= a2 > 0, got a1={self.a1}, a2={self.a2}")
        if self.r1 < 0 or self.r2 < 0:
            raise ValidationError("target rates must be >= 0")
        if self.oma_convention not in ("full", "half"):
            raise ValidationError(f"oma_convention must be 'full' or 'half', got {self.oma_convention!r}")

    @property
    def theta1(self) -> float:
        return sir_threshold(self.r1)

    @property
    def theta2(self) -> float:
        return sir_threshold(self.r2)


def sir_threshold(rate: float) -> float:
    """SIR needed for ``rate`` bits/s/Hz; the factor 2 is the two-slot rate convention."""
    return 2.0 ** (2.0 * rate) - 1.0


@dataclass(frozen=True)
class RoadLayout:
    lanes_x: int = 1
    lanes_y: int = 1
    lane_width: float = 3.5

    def __post_init__(self):
        for name in ("lanes_x", "lanes_y"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
        # zero width stacks identical lanes on the centre line
        if not self.lane_width >= 0:
            raise ValidationError(f"lane_width must be >= 0, got {self.lane_width}")

    def lane_offsets(self, axis: RoadAxis) -> tuple[float, ...]:
        """Perpendicular lane shifts, centred on the road's centre line."""
        n = self.lanes_x if axis is RoadAxis.X else self.lanes_y
        return tuple((k - (n - 1) / 2.0) * self.lane_width for k in range(n))


@dataclass(frozen=True)
class Scenario:
    source: Placement = field(default_factory=lambda: Placement(0.0, 0.0))
    d1: Placement = field(default_factory=lambda: placement_from_cartesian(100.0, 10.0))
    d2: Placement = field(default_factory=lambda: placement_from_cartesian(100.0, -10.0))
    propagation: Propagation = field(default_factory=Propagation)
    antenna: Antenna = field(default_factory=Antenna)
    traffic: Traffic = field(default_factory=Traffic)
    noma: Noma = field(default_factory=Noma)
    layout: RoadLayout = field(default_factory=RoadLayout)
    # Pins the S-D link state for both destinations; None draws it from the blockage model
    forced_link_state: LinkState | None = None

    def __post_init__(self):
        for name in ("d1", "d2"):
            if not distance(self.source, getattr(self, name)) > 0:
                raise ValidationError(f"source and {name} must not coincide")

    @property
    def r_sd1(self) -> float:
        return distance(self.source, self.d1)

    @property
    def r_sd2(self) -> float:
        return distance(self.source, self.d2)

    @property
    def upsilon(self) -> float:
        return upsilon(self.antenna)

    def destination(self, i: int) -> Placement:
        if i not in (1, 2):
            raise ValueError(f"destination index must be 1 or 2, got {i}")
        return self.d1 if i == 1 else self.d2

    def link_state_probability(self, i: int, state: LinkState) -> float:
        """P(state) for the S-D_i link."""
        if self.forced_link_state is not None:
            return 1.0 if state is self.forced_link_state else 0.0
        r = self.r_sd1 if i == 1 else self.r_sd2
        p_los = los_probability(r, self.propagation.beta)
        return p_los if state is LinkState.LOS else 1.0 - p_los

    def with_changes(self, **kw) -> Scenario:
        return replace(self, **kw)


def force_link_states(sc: Scenario, state: LinkState) -> Scenario:
    """Every link in ``state``: S-D links pinned, all interferers moved into
    the ``state`` population of their road (vehicle counts preserved)."""
    t = sc.traffic
    x_total = t.lam_x_los + t.lam_x_nlos
    y_total = t.lam_y_los + t.lam_y_nlos
    if state is LinkState.LOS:
        traffic = Traffic(x_total, 0.0, y_total, 0.0, t.p)
    else:
        traffic = Traffic(0.0, x_total, 0.0, y_total, t.p)
    return replace(sc, traffic=traffic, forced_link_state=state)
