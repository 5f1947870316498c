"""``l2lab <suite> --config <path> [--out DIR] [--seed S] [--truncation N] [--grid n]``.

Exit codes: 0 all checks pass, 1 some check failed, 2 configuration
error, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError
from .runner import SUITES, emit_report, load_config, merge_config, run_suite


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="l2lab", description="Run an l2lab experiment suite.")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--config", help="JSON file with suite parameters")
    p.add_argument("--out", default="l2lab-out", help="output directory (default: l2lab-out)")
    p.add_argument("--seed", type=int)
    p.add_argument("--truncation", type=int, help="basis degree / Laurent range")
    p.add_argument("--grid", type=int, help="number of grid points")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        user = load_config(args.config) if args.config else {}
        cfg = merge_config(args.suite, user,
                           {"seed": args.seed, "truncation": args.truncation, "grid": args.grid})
        rep = run_suite(args.suite, cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        path = emit_report(rep, args.out)
    except OSError as e:
        print(f"cannot write report: {e}", file=sys.stderr)
        return 2
    for c in rep.checks:
        status = "PASS" if c.passed else "FAIL"
        extra = f" [{c.error}]" if c.error else ""
        print(f"{status}  {c.name}{extra}")
    print(f"{len(rep.checks)} checks, pass={rep.passed}; report at {path}")
    if rep.passed:
        return 0
    return 3 if rep.nonconvergent else 1


if __name__ == "__main__":
    sys.exit(main())
