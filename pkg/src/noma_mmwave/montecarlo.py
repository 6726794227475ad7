"""Monte Carlo estimate of the outage events, used as an independent check
on the closed forms.

Every trial draws its own world from a generator keyed on (seed, trial
index), so results do not depend on how trials are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .outage import oma_thresholds, thresholds
from .scenario import LinkState, Placement, RoadAxis, Scenario

DEFAULT_WINDOW = 1e4
SCHEMES = ("NOMA", "OMA")
_AXES = (RoadAxis.X, RoadAxis.Y)
_STATES = (LinkState.LOS, LinkState.NLOS)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_err: float
    trials: int
    seed: int

    @classmethod
    def from_count(cls, count: int, trials: int, seed: int) -> McEstimate:
        mean = count / trials
        return cls(mean, math.sqrt(mean * (1.0 - mean) / trials), trials, seed)


@dataclass(frozen=True)
class Realization:
    """One sampled world.

    Interferers are stored column-wise; ``fade2[:, 0]`` and ``fade2[:, 1]``
    are the power fades towards D1 and D2.
    """

    link_state_d1: LinkState
    link_state_d2: LinkState
    h2_sd1: float
    h2_sd2: float
    axis: np.ndarray  # 0 for the X road, 1 for the Y road
    lane_offset: np.ndarray
    los: np.ndarray
    position: np.ndarray
    active: np.ndarray
    fade2: np.ndarray

    @property
    def interferers(self):
        for k in range(len(self.position)):
            yield (_AXES[self.axis[k]], self.lane_offset[k],
                   LinkState.LOS if self.los[k] else LinkState.NLOS,
                   self.position[k], bool(self.active[k]), tuple(self.fade2[k]))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def sample_ppp(intensity: float, window: tuple[float, float], rng: np.random.Generator) -> np.ndarray:
    lo, hi = window
    if not hi > lo:
        raise ValueError(f"window must satisfy hi > lo, got {window}")
    n = rng.poisson(intensity * (hi - lo)) if intensity > 0 else 0
    return rng.uniform(lo, hi, size=n)


def sample_nakagami_power(m: int, mu: float, rng: np.random.Generator, size=None):
    """|h|^2 for Nakagami-m amplitude: Gamma with shape m and mean mu."""
    return rng.gamma(m, mu / m, size=size)


def _draw_state(sc: Scenario, i: int, rng) -> LinkState:
    if sc.forced_link_state is not None:
        return sc.forced_link_state
    return LinkState.LOS if rng.random() < sc.link_state_probability(i, LinkState.LOS) else LinkState.NLOS


def sample_realization(sc: Scenario, rng: np.random.Generator, window: float = DEFAULT_WINDOW) -> Realization:
    prop = sc.propagation
    z1 = _draw_state(sc, 1, rng)
    z2 = _draw_state(sc, 2, rng)
    h1 = float(sample_nakagami_power(prop.m(z1), prop.mu, rng))
    h2 = float(sample_nakagami_power(prop.m(z2), prop.mu, rng))

    axis, offs, los, pos = [], [], [], []
    for a_idx, axis_ in enumerate(_AXES):
        for off in sc.layout.lane_offsets(axis_):
            for state in _STATES:
                pts = sample_ppp(sc.traffic.intensity(axis_, state), (-window, window), rng)
                pos.append(pts)
                axis.append(np.full(len(pts), a_idx, dtype=np.int8))
                offs.append(np.full(len(pts), off))
                los.append(np.full(len(pts), state is LinkState.LOS))
    position = np.concatenate(pos)
    n = len(position)
    active = rng.random(n) < sc.traffic.p
    fade2 = rng.exponential(1.0, size=(n, 2))
    return Realization(z1, z2, h1, h2, np.concatenate(axis), np.concatenate(offs),
                       np.concatenate(los), position, active, fade2)


def aggregate_interference(real: Realization, at: Placement, sc: Scenario, receiver: int = 1) -> tuple[float, float]:
    """Interference power (X road, Y road) at ``at``, using the fades drawn
    towards destination ``receiver``."""
    prop = sc.propagation
    ax, ay = at.cartesian()
    on_x = real.axis == 0
    # lane offset is the fixed coordinate, position runs along the road
    dx = np.where(on_x, real.position - ax, real.lane_offset - ax)
    dy = np.where(on_x, real.lane_offset - ay, real.position - ay)
    r = np.hypot(dx, dy)
    alpha = np.where(real.los, prop.alpha_los, prop.alpha_nlos)
    with np.errstate(divide="ignore"):
        power = real.fade2[:, receiver - 1] * r ** (-alpha) * sc.upsilon
    power = np.where(real.active, power, 0.0)
    return float(power[on_x].sum()), float(power[~on_x].sum())


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf if num > 0 else 0.0
    return num / den


def trial_outcomes(real: Realization, sc: Scenario, scheme: str = "NOMA") -> tuple[bool, bool]:
    """(outage at D1, outage at D2) for one realization."""
    prop, noma, ups = sc.propagation, sc.noma, sc.upsilon
    i1 = sum(aggregate_interference(real, sc.d1, sc, 1))
    i2 = sum(aggregate_interference(real, sc.d2, sc, 2))
    sig1 = real.h2_sd1 * sc.r_sd1 ** (-prop.alpha(real.link_state_d1)) * ups
    sig2 = real.h2_sd2 * sc.r_sd2 ** (-prop.alpha(real.link_state_d2)) * ups

    if scheme == "NOMA":
        th1, th2 = noma.theta1, noma.theta2
        o1 = _ratio(sig1 * noma.a1, sig1 * noma.a2 + i1) < th1
        o2 = (_ratio(sig2 * noma.a1, sig2 * noma.a2 + i2) < th1
              or _ratio(sig2 * noma.a2, i2) < th2)
        return o1, o2
    if scheme == "OMA":
        t1, t2 = oma_thresholds(noma)
        return _ratio(sig1, i1) < t1, _ratio(sig2, i2) < t2
    raise ValueError(f"unknown scheme {scheme!r}")


def count_outages(sc: Scenario, schemes, seed: int, start: int, stop: int,
                  window: float = DEFAULT_WINDOW) -> dict:
    """Outage counts over trials ``start..stop-1``; all schemes share the same worlds."""
    counts = {s: [0, 0] for s in schemes}
    for t in range(start, stop):
        real = sample_realization(sc, trial_rng(seed, t), window)
        for s in schemes:
            o1, o2 = trial_outcomes(real, sc, s)
            counts[s][0] += o1
            counts[s][1] += o2
    return counts


def _chunks(trials: int, n: int):
    n = max(1, min(n, trials))
    edges = np.linspace(0, trials, n + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_mc_schemes(sc: Scenario, schemes=SCHEMES, trials: int = 10_000, seed: int = 0,
                   window: float = DEFAULT_WINDOW, workers: int = 1) -> dict:
    """``{scheme: (estimate at D1, estimate at D2)}`` for several schemes at once."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    schemes = tuple(schemes)
    total = {s: [0, 0] for s in schemes}
    if workers <= 1:
        parts = [count_outages(sc, schemes, seed, 0, trials, window)]
    else:
        chunks = _chunks(trials, 4 * workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(count_outages, sc, schemes, seed, a, b, window) for a, b in chunks]
            parts = [f.result() for f in futures]
    for part in parts:
        for s in schemes:
            total[s][0] += part[s][0]
            total[s][1] += part[s][1]
    return {s: (McEstimate.from_count(total[s][0], trials, seed),
                McEstimate.from_count(total[s][1], trials, seed)) for s in schemes}


def run_mc(sc: Scenario, scheme: str = "NOMA", trials: int = 10_000, seed: int = 0,
           window: float = DEFAULT_WINDOW, workers: int = 1) -> tuple[McEstimate, McEstimate]:
    return run_mc_schemes(sc, (scheme,), trials, seed, window, workers)[scheme]
