"""Configuration, figure-recipe sweeps and CSV output.

Config grammar: UTF-8 text of ``key = value`` pairs separated by newlines or
whitespace, ``#`` starts a comment.  Values carry no internal spaces; grids
are comma separated.  Unknown keys are rejected.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import NumericalIntegrityError, ValidationError
from .montecarlo import DEFAULT_WINDOW, run_mc_schemes
from .outage import outage_d1, outage_d2, outage_oma
from .scenario import (
    Antenna, LinkState, Noma, Propagation, RoadLayout, Scenario, Traffic,
    db_to_linear, force_link_states, placement_from_cartesian,
)

SCENARIO_DEFAULTS = {
    "s_x": 0.0, "s_y": 0.0,
    "d1_x": 100.0, "d1_y": 10.0,
    "d2_x": 100.0, "d2_y": -10.0,
    "alpha_los": 2.0, "alpha_nlos": 4.0,
    "m_los": 2, "m_nlos": 1,
    "mu": 1.0, "beta": 9.5e-3,
    "g_max_dbi": 18.0, "g_min_dbi": -10.0,
    "phi": math.pi / 6, "carrier_freq": 30e9,
    "lam_x_los": 0.01, "lam_x_nlos": 0.01, "lam_y_los": 0.01, "lam_y_nlos": 0.01,
    "p": 1.0,
    "a1": 0.9, "a2": 0.1,
    "r1": 0.5, "r2": 0.5,
    "oma_convention": "full",
    "lanes_x": 1, "lanes_y": 1, "lane_width": 3.5,
    "link_state": "mixed",
}
SCENARIO_KEYS = tuple(SCENARIO_DEFAULTS)
INT_KEYS = {"m_los", "m_nlos", "lanes_x", "lanes_y", "trials", "seed", "workers"}
STR_CHOICES = {
    "oma_convention": ("full", "half"),
    "link_state": ("mixed", "los", "nlos"),
    "coupling": ("product", "exact"),
    "recipe": ("fig2_distance", "fig3_link_distance", "fig4_los_split",
               "fig5_noma_oma", "fig6_lanes", "custom"),
}
RUN_DEFAULTS = {
    "recipe": "custom",
    "sweep_var": None,
    "grid": None,
    "trials": 10_000,
    "seed": 0,
    "window": DEFAULT_WINDOW,
    "workers": 1,
    "coupling": "product",
    "fig5_a1": (0.9, 0.7),
    "lane_counts": (1, 2, 3),
}
LIST_KEYS = {"grid", "fig5_a1", "lane_counts"}
# "lam" sets all four interferer intensities at once
ALIASES = {"lam": ("lam_x_los", "lam_x_nlos", "lam_y_los", "lam_y_nlos")}

LAM_GRID = (1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2)
RECIPES = {
    # recipe: (swept variable, default grid)
    "fig2_distance": ("d_triplet", tuple(float(d) for d in range(200, -1, -10))),
    "fig3_link_distance": ("link_distance", tuple(float(d) for d in range(10, 201, 10))),
    "fig4_los_split": ("lam", LAM_GRID),
    "fig5_noma_oma": ("lam", LAM_GRID),
    "fig6_lanes": ("lam", LAM_GRID),
    "custom": (None, None),
}
RECIPE_HELP = {
    "fig2_distance": "Translate S, D1, D2 together by d_triplet metres along the X road "
                     "(d_triplet = 0 is the configured placement); relative offsets are kept.",
    "fig3_link_distance": "Place D1 and D2 at the same distance link_distance from S, along "
                          "their configured directions.  Reported peak distances differ "
                          "between D1 and D2 although the caption equates them; both are recorded.",
    "fig4_los_split": "For each lam: mixed blockage model, all-LOS and all-NLOS worlds.",
    "fig5_noma_oma": "For each lam: NOMA at every a1 in fig5_a1, and OMA.",
    "fig6_lanes": "For each lam: lanes_x = lanes_y = k for k in lane_counts.",
    "custom": "Sweep any numeric scenario key given by sweep_var over grid.",
}


@dataclass(frozen=True)
class SweepSpec:
    recipe: str
    variable: str | None
    grid: tuple[float, ...] | None
    trials: int
    seed: int
    window: float = DEFAULT_WINDOW
    workers: int = 1
    coupling: str = "product"
    fig5_a1: tuple[float, ...] = (0.9, 0.7)
    lane_counts: tuple[int, ...] = (1, 2, 3)
    params: dict = field(default_factory=dict)


_PAIR = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*([^\s=#]+)")


def tokenize(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        # tolerate spaces after commas in lists
        line = re.sub(r",\s+", ",", line)
        pos = 0
        for m in _PAIR.finditer(line):
            if line[pos:m.start()].strip():
                raise ValidationError(f"line {lineno}: cannot parse {line[pos:m.start()].strip()!r}")
            pairs.append((m.group(1), m.group(2)))
            pos = m.end()
        if line[pos:].strip():
            raise ValidationError(f"line {lineno}: cannot parse {line[pos:].strip()!r}")
    return pairs


def _convert(key: str, raw: str):
    if key in STR_CHOICES:
        if raw not in STR_CHOICES[key]:
            raise ValidationError(f"{key} must be one of {STR_CHOICES[key]}, got {raw!r}")
        return raw
    if key == "sweep_var":
        return raw
    if key in LIST_KEYS:
        items = [x for x in raw.split(",") if x]
        if not items:
            raise ValidationError(f"{key} must not be empty")
        conv = "lane_counts" if key == "lane_counts" else None
        return tuple(_to_int(conv, x) if conv else _to_float(key, x) for x in items)
    if key in INT_KEYS:
        return _to_int(key, raw)
    return _to_float(key, raw)


def _to_float(key, raw) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ValidationError(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise ValidationError(f"{key}: value must be finite, got {raw!r}")
    return v


def _to_int(key, raw) -> int:
    v = _to_float(key, raw)
    if not v.is_integer():
        raise ValidationError(f"{key}: expected an integer, got {raw!r}")
    return int(v)


def resolve(pairs) -> tuple[dict, dict]:
    """Apply ``(key, raw value)`` pairs in order over the defaults."""
    params = dict(SCENARIO_DEFAULTS)
    run = dict(RUN_DEFAULTS)
    a1_set = a2_set = False
    for key, raw in pairs:
        if key in ALIASES:
            v = _to_float(key, raw)
            for k in ALIASES[key]:
                params[k] = v
        elif key in params:
            params[key] = _convert(key, raw)
            a1_set |= key == "a1"
            a2_set |= key == "a2"
        elif key in run:
            run[key] = _convert(key, raw)
        else:
            raise ValidationError(f"unknown config key {key!r}")
    if a1_set and not a2_set:
        params["a2"] = 1.0 - params["a1"]
    elif a2_set and not a1_set:
        params["a1"] = 1.0 - params["a2"]
    return params, run


def build_scenario(params: dict) -> Scenario:
    sc = Scenario(
        source=placement_from_cartesian(params["s_x"], params["s_y"]),
        d1=placement_from_cartesian(params["d1_x"], params["d1_y"]),
        d2=placement_from_cartesian(params["d2_x"], params["d2_y"]),
        propagation=Propagation(params["alpha_los"], params["alpha_nlos"], params["m_los"],
                                params["m_nlos"], params["mu"], params["beta"]),
        antenna=Antenna(db_to_linear(params["g_max_dbi"]), db_to_linear(params["g_min_dbi"]),
                        params["phi"], params["carrier_freq"]),
        traffic=Traffic(params["lam_x_los"], params["lam_x_nlos"], params["lam_y_los"],
                        params["lam_y_nlos"], params["p"]),
        noma=Noma(params["a1"], params["a2"], params["r1"], params["r2"], params["oma_convention"]),
        layout=RoadLayout(params["lanes_x"], params["lanes_y"], params["lane_width"]),
    )
    if params["link_state"] == "los":
        sc = force_link_states(sc, LinkState.LOS)
    elif params["link_state"] == "nlos":
        sc = force_link_states(sc, LinkState.NLOS)
    return sc


def _check_grid(grid):
    if not grid:
        raise ValidationError("sweep grid must not be empty")
    diffs = [b - a for a, b in zip(grid, grid[1:])]
    if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
        raise ValidationError("sweep grid must be strictly monotone")


def parse_config(text: str = "", overrides=()) -> tuple[Scenario, SweepSpec]:
    """Validated scenario and sweep description.

    ``overrides`` are ``key=value`` strings applied after the file contents.
    """
    pairs = tokenize(text)
    for item in overrides:
        pairs.extend(tokenize(item))
    params, run = resolve(pairs)
    sc = build_scenario(params)

    recipe = run["recipe"]
    variable, grid = RECIPES[recipe]
    if recipe == "custom":
        variable = run["sweep_var"]
        if variable is not None and variable not in SCENARIO_KEYS and variable not in ALIASES:
            raise ValidationError(f"sweep_var {variable!r} is not a scenario key")
        if variable in STR_CHOICES:
            raise ValidationError(f"sweep_var {variable!r} is not numeric")
    elif run["sweep_var"] not in (None, variable):
        raise ValidationError(f"recipe {recipe} sweeps {variable}, not {run['sweep_var']}")
    if run["grid"] is not None:
        grid = run["grid"]
    if grid is not None:
        _check_grid(grid)
    if variable is not None and grid is None:
        raise ValidationError(f"recipe {recipe} needs a grid")
    if run["trials"] < 0:
        raise ValidationError("trials must be >= 0")
    if run["workers"] < 1:
        raise ValidationError("workers must be >= 1")
    if not run["window"] > 0:
        raise ValidationError("window must be > 0")
    if any(k < 1 for k in run["lane_counts"]):
        raise ValidationError("lane_counts must be positive")
    spec = SweepSpec(recipe, variable, grid, run["trials"], run["seed"], run["window"],
                     run["workers"], run["coupling"], run["fig5_a1"], run["lane_counts"], params)
    return sc, spec


def load_config(path=None, overrides=()) -> tuple[Scenario, SweepSpec]:
    text = ""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_config(text, overrides)


# --- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    """One evaluation: resolved parameters plus the labels of its curve."""

    params: dict
    variant: str
    scheme: str
    value: float | None


def with_recipe_override(params: dict, recipe: str, variable: str | None, value: float) -> dict:
    p = dict(params)
    if variable is None:
        return p
    if recipe == "fig2_distance":
        for k in ("s_x", "d1_x", "d2_x"):
            p[k] = params[k] + value
    elif recipe == "fig3_link_distance":
        sx, sy = params["s_x"], params["s_y"]
        for d in ("d1", "d2"):
            vx, vy = params[f"{d}_x"] - sx, params[f"{d}_y"] - sy
            norm = math.hypot(vx, vy)
            p[f"{d}_x"] = sx + value * vx / norm
            p[f"{d}_y"] = sy + value * vy / norm
    elif variable in ALIASES:
        for k in ALIASES[variable]:
            p[k] = value
    else:
        p[variable] = int(value) if variable in INT_KEYS else value
    if variable == "a1":
        p["a2"] = 1.0 - value
    elif variable == "a2":
        p["a1"] = 1.0 - value
    return p


def expand_points(spec: SweepSpec) -> list[Point]:
    grid = spec.grid if spec.grid is not None else (None,)
    points = []
    for value in grid:
        base = with_recipe_override(spec.params, spec.recipe, spec.variable, value)
        if spec.recipe == "fig4_los_split":
            for variant in ("mixed", "los", "nlos"):
                points.append(Point({**base, "link_state": variant}, variant, "NOMA", value))
        elif spec.recipe == "fig5_noma_oma":
            for a1 in spec.fig5_a1:
                points.append(Point({**base, "a1": a1, "a2": 1.0 - a1}, f"noma_a1={a1!r}", "NOMA", value))
            points.append(Point(base, "oma", "OMA", value))
        elif spec.recipe == "fig6_lanes":
            for k in spec.lane_counts:
                points.append(Point({**base, "lanes_x": k, "lanes_y": k}, f"lanes={k}", "NOMA", value))
        else:
            points.append(Point(base, "", "NOMA", value))
    return points


OUTCOME_COLUMNS = ("outage_d1_analytic", "outage_d2_analytic", "outage_d1_mc", "outage_d1_stderr",
                   "outage_d2_mc", "outage_d2_stderr", "trials", "seed")


def columns_for(spec: SweepSpec) -> list[str]:
    cols = ["recipe", "variant", "scheme", "sweep_var", "sweep_value"]
    if spec.variable is not None and spec.variable not in SCENARIO_KEYS:
        cols.append(spec.variable)
    cols += list(SCENARIO_KEYS) + ["r_sd1", "r_sd2", "upsilon", "coupling"] + list(OUTCOME_COLUMNS)
    return cols


def evaluate_point(point: Point, spec: SweepSpec) -> dict:
    sc = build_scenario(point.params)
    try:
        if point.scheme == "OMA":
            o1, o2 = outage_oma(sc, spec.coupling)
        else:
            o1 = outage_d1(sc, spec.coupling).total
            o2 = outage_d2(sc, spec.coupling).total
    except NumericalIntegrityError as exc:
        raise NumericalIntegrityError(
            f"{spec.recipe} {spec.variable}={point.value!r} {point.variant}: {exc}") from exc

    row = {
        "recipe": spec.recipe, "variant": point.variant, "scheme": point.scheme,
        "sweep_var": spec.variable or "", "sweep_value": point.value,
    }
    if spec.variable is not None and spec.variable not in SCENARIO_KEYS:
        row[spec.variable] = point.value
    row.update({k: point.params[k] for k in SCENARIO_KEYS})
    row.update({"r_sd1": sc.r_sd1, "r_sd2": sc.r_sd2, "upsilon": sc.upsilon, "coupling": spec.coupling})
    row.update({"outage_d1_analytic": o1, "outage_d2_analytic": o2,
                "outage_d1_mc": None, "outage_d1_stderr": None,
                "outage_d2_mc": None, "outage_d2_stderr": None,
                "trials": spec.trials, "seed": spec.seed})
    if spec.trials > 0:
        e1, e2 = run_mc_schemes(sc, (point.scheme,), spec.trials, spec.seed, spec.window)[point.scheme]
        row.update({"outage_d1_mc": e1.mean, "outage_d1_stderr": e1.std_err,
                    "outage_d2_mc": e2.mean, "outage_d2_stderr": e2.std_err})
    return row


def run_sweep(spec: SweepSpec) -> list[dict]:
    """One row per (grid value, curve), in grid order."""
    points = expand_points(spec)
    if spec.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            return list(pool.map(evaluate_point, points, [spec] * len(points)))
    return [evaluate_point(p, spec) for p in points]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_csv(rows: list[dict], columns=None) -> str:
    if not rows:
        raise ValueError("no rows to write")
    columns = list(columns or rows[0].keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def emit_csv(rows: list[dict], destination, columns=None) -> None:
    """Write ``rows`` to a path or an open text stream."""
    text = format_csv(rows, columns)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(os.fspath(destination), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {destination}: {exc}") from exc
