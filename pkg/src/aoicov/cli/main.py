"""Command-line entry point: ``aoicov run`` and ``aoicov report``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from ..errors import AoicovError
from .config import Kind, load_config
from .experiments import run_experiment
from .report import report_summary


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aoicov", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate an experiment and write its CSV")
    r.add_argument("--config", help="key = value config file (defaults if omitted)")
    r.add_argument("--experiment", choices=[k.value for k in Kind],
                   help="overrides the config's experiment key")
    r.add_argument("--seed", type=int, help="master seed")
    r.add_argument("--periods", type=int, help="simulated sensing periods per point")
    r.add_argument("--output", default=".", help="output directory")
    r.add_argument("--no-sim", action="store_true", help="analytical columns only")
    r.add_argument("--jobs", type=int, default=1, help="worker threads")

    rep = sub.add_parser("report", help="summarise experiment CSVs")
    rep.add_argument("csv", nargs="+")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "report":
            report_summary(args.csv, sys.stdout)
            return 0
        spec = load_config(args.config, args.experiment)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise AoicovError("--seed must be an unsigned 64-bit integer")
            spec = replace(spec, seed=args.seed)
        if args.periods is not None:
            if args.periods < 1:
                raise AoicovError("--periods must be >= 1")
            spec = replace(spec, periods=args.periods)
        if args.jobs < 1:
            raise AoicovError("--jobs must be >= 1")
        result = run_experiment(spec, args.output, simulate=not args.no_sim, jobs=args.jobs)
    except (AoicovError, OSError) as exc:
        print(f"aoicov: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.path} ({len(result.rows)} rows)")
    if not result.ok:
        failed = [r["check"] for r in result.rows if not r["passed"]]
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
