"""Command-line runner.

Exit codes: 0 success, 1 configuration error, 2 validation failure.
"""
from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .config import ConfigError, ScenarioConfig, load_config_file

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON scenario file")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--out", help="output table path (a .meta.json sidecar is written next to it)")

    p = argparse.ArgumentParser(prog="lawn-isac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("converge", parents=[common], help="equilibrium trace, one row per outer iteration")

    sw = sub.add_parser("sweep", parents=[common], help="scheme comparison over one parameter")
    sw.add_argument("--param", required=True, choices=sorted(ex.SWEEP_PARAMS))
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--runs", type=int, default=1, help="seeds averaged per point")
    sw.add_argument("--scheme", default=",".join(ex.SCHEMES), help="comma-separated subset of schemes")

    av = sub.add_parser("aoi-validate", parents=[common], help="closed-form age against the simulator")
    av.add_argument("--runs", type=int, default=1_000_000, help="simulated deliveries per cell")
    av.add_argument("--wrong-formula", action="store_true", help=argparse.SUPPRESS)

    bl = sub.add_parser("baselines", parents=[common], help="equilibrium against the baselines")
    bl.add_argument("--scheme", default=",".join(ex.SCHEMES), help="comma-separated subset of schemes")

    un = sub.add_parser("uniqueness", parents=[common], help="multi-start equilibrium probe")
    un.add_argument("--runs", type=int, default=10, help="number of random starts")
    return p


def _config(args) -> ScenarioConfig:
    cfg = load_config_file(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _schemes(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in ex.SCHEMES]
    if bad or not names:
        raise ConfigError(f"unknown scheme(s) {bad or names}; expected a subset of {ex.SCHEMES}", "scheme")
    return names


def _emit(args, rows, columns, meta):
    if args.out:
        ex.write_table(args.out, rows, columns, meta)
    else:
        sys.stdout.write(ex.format_table(rows, columns))


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "converge":
            rows, trace = ex.converge_table(cfg)
            _emit(args, rows, ex.TRACE_COLUMNS,
                  ex.metadata(cfg, "converge", {"termination": trace.termination}))
            return EXIT_OK if trace.termination == "converged" else EXIT_VALIDATION

        if args.command == "sweep":
            values = ex.parse_sweep_values(args.param, args.values)
            schemes = _schemes(args.scheme)
            rows = ex.sweep_table(cfg, args.param, values, args.runs, schemes)
            _emit(args, rows, ex.SWEEP_COLUMNS,
                  ex.metadata(cfg, "sweep", {"param": args.param, "values": values, "runs": args.runs}))
            return EXIT_OK

        if args.command == "aoi-validate":
            if args.runs < 1000:
                raise ConfigError("aoi-validate needs at least 1000 deliveries", "runs")
            rows = ex.aoi_validation_table(n_deliveries=args.runs, seed=cfg.seed,
                                           wrong_formula=args.wrong_formula)
            _emit(args, rows, ex.AOI_COLUMNS,
                  ex.metadata(None, "aoi-validate", {"deliveries": args.runs, "seed": cfg.seed}))
            return EXIT_OK if all(r["status"] == "PASS" for r in rows) else EXIT_VALIDATION

        if args.command == "baselines":
            rows = ex.baselines_table(cfg, _schemes(args.scheme))
            _emit(args, rows, ex.SCHEME_COLUMNS,
                  ex.metadata(cfg, "baselines", {"random_draws": ex.RANDOM_DRAWS}))
            return EXIT_OK

        if args.command == "uniqueness":
            if args.runs < 1:
                raise ConfigError("uniqueness needs at least one start", "runs")
            rows, report = ex.uniqueness_table(cfg, args.runs)
            summary = {"max_strategy_distance": report.max_strategy_distance,
                       "max_utility_gap": report.max_utility_gap, "threshold": report.threshold,
                       "offending_starts": list(report.offending) if report.offending else None}
            _emit(args, rows, ex.UNIQ_COLUMNS, ex.metadata(cfg, "uniqueness", summary))
            if not report.unique:
                print(f"multiple equilibria: starts {report.offending} differ by "
                      f"{report.max_strategy_distance:.3g}", file=sys.stderr)
                return EXIT_VALIDATION
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


def main() -> None:
    sys.exit(run())
