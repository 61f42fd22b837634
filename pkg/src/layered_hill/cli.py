"""Command-line interface.

Subcommands:
  estimate   -- one layered Hill fit on a CSV point cloud, JSON to stdout
  simulate   -- Monte Carlo point-estimate/RMSE table to CSV
  coverage   -- confidence-interval coverage rates to CSV
  normality  -- normalized-statistic samples to CSV
  constants  -- geometric constants of a constraint, JSON to stdout

Exit codes: 0 success, 2 configuration errors, 3 insufficient extremes
in estimate mode.
"""

from __future__ import annotations

import argparse
import json
import sys

from .constraints import KINDS, Constraint
from .errors import ConfigInvalid, InsufficientExtremes, LayeredHillError
from .estimation import estimate_from_stream, geometric_constants
from .geometry import load_points_csv
from .harness import (
    config_from_dict,
    export_normalized_samples,
    run_experiment,
)
from .order_stats import top_tuple_values

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INSUFFICIENT = 3


def _constraint_args(parser):
    parser.add_argument("--constraint", required=True, choices=KINDS)
    parser.add_argument("--radius", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layered-hill",
        description="Layered Hill estimation of heavy-tail exponents",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the tail exponent from a CSV point cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _constraint_args(p)
    p.add_argument("--gamma", type=float, default=0.95)

    for name, help_text in [
        ("simulate", "run a Monte Carlo experiment and write the report CSV"),
        ("coverage", "run a coverage experiment and write the coverage CSV"),
        ("normality", "export normalized-statistic samples to CSV"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("constants", help="geometric constants of a constraint")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _constraint_args(p)
    p.add_argument("--mc-samples", type=int, default=None)

    return parser


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(doc)


def _cmd_estimate(args) -> int:
    cloud = load_points_csv(args.input, dim=args.dim)
    constraint = Constraint(kind=args.constraint, arity=args.k, radius=args.radius)
    try:
        stream = top_tuple_values(cloud, constraint, args.m**args.k)
        report = estimate_from_stream(
            stream, args.k, cloud.dim, len(cloud), args.m, gamma=args.gamma
        )
    except InsufficientExtremes as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    print(report.to_json())
    return EXIT_OK


def _cmd_constants(args) -> int:
    constraint = Constraint(kind=args.constraint, arity=args.k, radius=args.radius)
    gc = geometric_constants(constraint, args.dim, mc_samples=args.mc_samples)
    print(json.dumps(gc.to_dict()))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "constants":
            return _cmd_constants(args)
        config = _load_config(args.config)
        if args.command == "simulate":
            run_experiment(config, workers=args.workers).write_report_csv(args.out)
        elif args.command == "coverage":
            run_experiment(config, workers=args.workers).write_coverage_csv(args.out)
        elif args.command == "normality":
            export_normalized_samples(config, args.out, workers=args.workers)
        return EXIT_OK
    except (ConfigInvalid, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LayeredHillError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
