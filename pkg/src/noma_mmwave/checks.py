"""Analytic-vs-simulation validation grid and qualitative trend checks."""

from __future__ import annotations

from dataclasses import dataclass

from .experiments import SCENARIO_DEFAULTS, SweepSpec, build_scenario, run_sweep
from .montecarlo import DEFAULT_WINDOW, run_mc_schemes
from .outage import outage_d1, outage_d2, outage_oma

VALIDATION_LAMS = (1e-3, 5e-3, 1e-2, 5e-2)
VALIDATION_GEOMETRIES = {
    "defaults": {},
    # short links close to the intersection
    "near": {"s_x": 20.0, "s_y": 5.0, "d1_x": 40.0, "d1_y": 8.0, "d2_x": 35.0, "d2_y": -6.0},
    # roadside unit at a corner, D2 on the Y road
    "corner": {"s_x": -15.0, "s_y": -15.0, "d1_x": -60.0, "d1_y": 3.0, "d2_x": 0.0, "d2_y": -50.0},
}
MIN_TOLERANCE = 0.01
TREND_TOL = 1e-12


@dataclass(frozen=True)
class Comparison:
    geometry: str
    lam: float
    scheme: str
    destination: int
    analytic: float
    mc: float
    std_err: float

    @property
    def tolerance(self) -> float:
        return max(3.0 * self.std_err, MIN_TOLERANCE)

    @property
    def passed(self) -> bool:
        return abs(self.analytic - self.mc) <= self.tolerance

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag} {self.geometry:<8} lam={self.lam:<7g} {self.scheme:<4} D{self.destination} "
                f"analytic={self.analytic:.5f} mc={self.mc:.5f} "
                f"|diff|={abs(self.analytic - self.mc):.5f} tol={self.tolerance:.5f}")


def validation_grid(base: dict | None = None, trials: int = 10_000, seed: int = 0,
                    window: float = DEFAULT_WINDOW, coupling: str = "product",
                    lams=VALIDATION_LAMS, geometries=None) -> list[Comparison]:
    base = dict(SCENARIO_DEFAULTS if base is None else base)
    geometries = VALIDATION_GEOMETRIES if geometries is None else geometries
    out = []
    for gname, geo in geometries.items():
        for lam in lams:
            params = {**base, **geo, "lam_x_los": lam, "lam_x_nlos": lam,
                      "lam_y_los": lam, "lam_y_nlos": lam}
            sc = build_scenario(params)
            analytic = {
                "NOMA": (outage_d1(sc, coupling).total, outage_d2(sc, coupling).total),
                "OMA": outage_oma(sc, coupling),
            }
            mc = run_mc_schemes(sc, ("NOMA", "OMA"), trials, seed, window)
            for scheme in ("NOMA", "OMA"):
                for i in (1, 2):
                    est = mc[scheme][i - 1]
                    out.append(Comparison(gname, lam, scheme, i, analytic[scheme][i - 1], est.mean, est.std_err))
    return out


@dataclass(frozen=True)
class TrendResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def _violations(seq, label, tol=TREND_TOL):
    """Indices where ``seq`` decreases by more than ``tol``."""
    return [f"{label}[{k}] {a:.6g}->{b:.6g}" for k, (a, b) in enumerate(zip(seq, seq[1:])) if b < a - tol]


def _curves(rows, key="variant"):
    out = {}
    for r in rows:
        out.setdefault(r[key], []).append(r)
    return out


def _sweep(params: dict, recipe: str, variable: str, grid, coupling: str, **kw) -> list[dict]:
    spec = SweepSpec(recipe, variable, tuple(grid), 0, 0, coupling=coupling, params=params, **kw)
    return run_sweep(spec)


def trend_checks(params: dict | None = None, lams=None, coupling: str = "product") -> list[TrendResult]:
    """Qualitative figure trends, evaluated analytically."""
    from .experiments import LAM_GRID

    params = dict(SCENARIO_DEFAULTS if params is None else params)
    lams = tuple(LAM_GRID if lams is None else lams)
    results = []

    fig4 = _curves(_sweep(params, "fig4_los_split", "lam", lams, coupling))
    fig5 = _curves(_sweep(params, "fig5_noma_oma", "lam", lams, coupling))
    fig6 = _curves(_sweep(params, "fig6_lanes", "lam", lams, coupling))

    bad = []
    for fig, curves in (("fig4", fig4), ("fig5", fig5), ("fig6", fig6)):
        for variant, rows in curves.items():
            for d in (1, 2):
                bad += _violations([r[f"outage_d{d}_analytic"] for r in rows], f"{fig}/{variant}/D{d}")
    results.append(TrendResult("outage non-decreasing in lam", not bad, "; ".join(bad)))

    bad = []
    for k, lam in enumerate(lams):
        for d in (1, 2):
            key = f"outage_d{d}_analytic"
            los, mixed, nlos = (fig4[v][k][key] for v in ("los", "mixed", "nlos"))
            if los < mixed - TREND_TOL:
                bad.append(f"lam={lam:g} D{d}: los {los:.6f} < mixed {mixed:.6f}")
            if mixed < nlos - TREND_TOL:
                bad.append(f"lam={lam:g} D{d}: mixed {mixed:.6f} < nlos {nlos:.6f}")
    results.append(TrendResult("LOS-forced >= mixed >= NLOS-forced", not bad, "; ".join(bad)))

    bad = []
    variants = list(fig6)
    for k, lam in enumerate(lams):
        for d in (1, 2):
            seq = [fig6[v][k][f"outage_d{d}_analytic"] for v in variants]
            bad += _violations(seq, f"lam={lam:g}/D{d} lanes")
    results.append(TrendResult("outage non-decreasing in lane count", not bad, "; ".join(bad)))

    bad = []
    approach = [float(d) for d in range(200, -1, -10)]
    for lam in sorted({params["lam_x_los"], 1e-3}):
        p = {**params, "lam_x_los": lam, "lam_x_nlos": lam, "lam_y_los": lam, "lam_y_nlos": lam}
        rows = _sweep(p, "fig2_distance", "d_triplet", approach, coupling)
        for d in (1, 2):
            seq = [r[f"outage_d{d}_analytic"] for r in rows]
            bad += _violations(seq, f"lam={lam:g}/D{d} approach")
            if seq[-1] <= seq[0] and seq[0] < 1.0:
                bad.append(f"lam={lam:g}/D{d}: no increase from d=200 to d=0")
    results.append(TrendResult("outage increases as the triplet approaches the intersection", not bad, "; ".join(bad)))

    bad = []
    a_hi, a_lo = max(fig5_a1 := (0.9, 0.7)), min(fig5_a1)
    hi, lo = fig5[f"noma_a1={a_hi!r}"], fig5[f"noma_a1={a_lo!r}"]
    for k, lam in enumerate(lams):
        if hi[k]["outage_d1_analytic"] > lo[k]["outage_d1_analytic"] + TREND_TOL:
            bad.append(f"lam={lam:g}: D1 outage rises with a1")
        if hi[k]["outage_d2_analytic"] < lo[k]["outage_d2_analytic"] - TREND_TOL:
            bad.append(f"lam={lam:g}: D2 outage falls with a1")
    results.append(TrendResult("larger a1 favours D1 and penalises D2", not bad, "; ".join(bad)))
    return results
