"""Batch command line: analytic and simulated outage, figure sweeps,
validation and trend self-checks.

Exit codes: 0 success, 2 validation error, 3 numerical-integrity error,
4 failed check.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import checks
from .errors import NumericalIntegrityError, ValidationError
from .experiments import (
    Point, RECIPE_HELP, RECIPES, SweepSpec, columns_for, emit_csv, evaluate_point, format_csv,
    load_config, run_sweep,
)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per point (0 disables)")
    common.add_argument("--seed", type=int, help="base seed for the per-trial streams")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable)")

    ap = argparse.ArgumentParser(prog="noma-mmwave", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", parents=[common], help="closed-form outage for one scenario")
    sub.add_parser("mc", parents=[common], help="Monte Carlo outage for one scenario")
    sw = sub.add_parser("sweep", parents=[common], help="run a figure recipe",
                        epilog="\n".join(f"{k}: {v}" for k, v in RECIPE_HELP.items()),
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    sw.add_argument("recipe", choices=sorted(RECIPES))
    sub.add_parser("validate", parents=[common], help="analytic vs Monte Carlo on the 12-point grid")
    sub.add_parser("selfcheck", parents=[common], help="assert the qualitative figure trends")
    return ap


def _overrides(args) -> list[str]:
    extra = list(args.set)
    if args.trials is not None:
        extra.append(f"trials={args.trials}")
    if args.seed is not None:
        extra.append(f"seed={args.seed}")
    if getattr(args, "recipe", None):
        extra.append(f"recipe={args.recipe}")
    return extra


def _write(rows, columns, out):
    if out:
        emit_csv(rows, out, columns)
    else:
        sys.stdout.write(format_csv(rows, columns))


def _single(spec: SweepSpec, trials: int) -> SweepSpec:
    return SweepSpec("custom", None, None, trials, spec.seed, spec.window, spec.workers,
                     spec.coupling, spec.fig5_a1, spec.lane_counts, spec.params)


def _run(args) -> int:
    sc, spec = load_config(args.config, _overrides(args))

    if args.command in ("analytic", "mc"):
        trials = 0 if args.command == "analytic" else spec.trials
        if args.command == "mc" and trials < 1:
            raise ValidationError("mc needs trials >= 1")
        one = _single(spec, trials)
        rows = []
        for scheme in ("NOMA", "OMA"):
            rows.append(evaluate_point(Point(spec.params, "", scheme, None), one))
        _write(rows, columns_for(one), args.out)
        return EXIT_OK

    if args.command == "sweep":
        rows = run_sweep(spec)
        _write(rows, columns_for(spec), args.out)
        return EXIT_OK

    if args.command == "validate":
        trials = spec.trials if spec.trials > 0 else 10_000
        comps = checks.validation_grid(spec.params, trials, spec.seed, spec.window, spec.coupling)
        for c in comps:
            print(c.line())
        if args.out:
            emit_csv([dataclasses.asdict(c) | {"tolerance": c.tolerance, "passed": c.passed} for c in comps], args.out)
        failed = sum(not c.passed for c in comps)
        print(f"{len(comps) - failed}/{len(comps)} comparisons within tolerance")
        return EXIT_OK if failed == 0 else EXIT_CHECK

    if args.command == "selfcheck":
        results = checks.trend_checks(spec.params, coupling=spec.coupling)
        for r in results:
            print(r.line())
        return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK
    raise AssertionError(args.command)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _run(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalIntegrityError as exc:
        print(f"numerical integrity error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
