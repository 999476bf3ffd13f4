"""Command-line entry point: run experiments and summarize their CSV output."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .evolution import MODES
from .experiment import PRESET_NAMES, make_spec, run_experiment, summarize


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitevo",
        description="Evolve planar modular robots, with or without lifetime gait learning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one experiment with seeded repetitions")
    run_p.add_argument("--mode", choices=MODES, required=True)
    run_p.add_argument("--preset", choices=PRESET_NAMES, default="desk")
    run_p.add_argument("--seed", type=int, default=0, help="master seed; run i uses seed+i")
    run_p.add_argument("--out", type=Path, required=True, help="output directory for CSV logs")
    run_p.add_argument("--reps", type=int, default=None, help="override preset repetitions")
    run_p.add_argument("--config", type=Path, default=None, help="JSON file overriding preset fields")
    run_p.add_argument(
        "--trajectories",
        action="store_true",
        help="also dump each run's best robot trajectory and body layout",
    )

    sum_p = sub.add_parser("summarize", help="aggregate runs CSVs into summary files")
    sum_p.add_argument("--in", dest="in_dir", type=Path, required=True)
    sum_p.add_argument("--out", dest="out_dir", type=Path, default=None)
    sum_p.add_argument("--bootstrap-samples", type=int, default=1000)
    sum_p.add_argument("--bootstrap-seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    if args.command == "run":
        overrides = None
        if args.config is not None:
            overrides = json.loads(args.config.read_text())
        spec = make_spec(
            mode=args.mode,
            preset=args.preset,
            master_seed=args.seed,
            out_dir=args.out,
            repetitions=args.reps,
            overrides=overrides,
        )
        run_experiment(spec, trajectories=args.trajectories)
        return 0
    if args.command == "summarize":
        summarize(
            args.in_dir,
            out_dir=args.out_dir,
            bootstrap_samples=args.bootstrap_samples,
            bootstrap_seed=args.bootstrap_seed,
        )
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
