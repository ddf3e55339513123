"""``branchlab <command> --scenario FILE [overrides]``.

Exit codes: 0 success, 2 scenario parse/schema error, 3 enumeration cap
exceeded, 4 precondition violated (e.g. identical distributions for
``validity-joint``), 1 anything else.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import (
    BranchLabError,
    CapExceeded,
    DimensionMismatch,
    EmptyDistribution,
    ExpectedCountTooSmall,
    NegativeWeight,
    NotNormalized,
    ParseError,
    SameDistribution,
    SchemaError,
)
from .runner import run_scenario
from .scenario import COMMANDS, build_config, convert_value, parse_values

EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_PRECONDITION = 4

_OVERRIDES = [
    ("--q", "q", "outcome weights, e.g. '1/2,1/2'"),
    ("--q-b", "q_b", "second distribution for validity-joint"),
    ("--n-outcomes", "n", "number of outcomes for achievable-set"),
    ("--n-runs", "N", "number of runs N, or a comma-separated list"),
    ("--epsilon", "epsilon", "frequency window half-width"),
    ("--delta", "delta", "outside-weight bound for the minimum sample size"),
    ("--seed", "seed", "splitmix64 seed"),
    ("--k-cap", "k_cap", "per-class cap on valid sequences"),
    ("--n-max", "n_max", "largest N scanned for the minimum sample size"),
    ("--trials", "trials", "number of consecutive seeds"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branchlab",
        description="Exact branch statistics for repeated measurements without collapse.",
    )
    parser.add_argument("--version", action="version", version=f"branchlab {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--scenario", type=Path, help="scenario file (key = value lines)")
    for flag, key, help_text in _OVERRIDES:
        parser.add_argument(flag, dest=f"override_{key}", help=help_text)
    parser.add_argument("--name", help="scenario name")
    parser.add_argument("--out-dir", type=Path, default=Path("results"), help="output directory (default: results)")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for per-N work")
    parser.add_argument("--quiet", action="store_true", help="do not print the summary")
    return parser


def _load_config(args):
    values = {}
    if args.scenario is not None:
        values = parse_values(args.scenario.read_text(encoding="utf-8"))
        if values.get("command", args.command) != args.command:
            raise SchemaError(f"scenario is for {values['command']!r}, not {args.command!r}")
    values["command"] = args.command
    for flag, key, _ in _OVERRIDES:
        raw = getattr(args, f"override_{key}")
        if raw is not None:
            try:
                values[key] = convert_value(key, raw)
            except (ValueError, TypeError) as exc:
                raise ParseError(f"bad value for {flag}: {exc}") from None
    if args.name is not None:
        values["name"] = args.name
    return build_config(values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        bundle = run_scenario(config, out_dir=args.out_dir, jobs=max(1, args.jobs))
    except (ParseError, SchemaError, NotNormalized, NegativeWeight, EmptyDistribution) as exc:
        print(f"branchlab: scenario error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceeded as exc:
        print(f"branchlab: {args.command}: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SameDistribution, DimensionMismatch, ExpectedCountTooSmall) as exc:
        print(f"branchlab: {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (BranchLabError, OSError) as exc:
        print(f"branchlab: {args.command}: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        if bundle.transcript is not None:
            sys.stdout.write(bundle.transcript)
        print(f"{config.command} '{config.name}': {len(bundle.rows)} rows")
        for name, path in sorted(bundle.files.items()):
            print(f"  wrote {path}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
