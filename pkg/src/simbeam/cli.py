"""Command-line front end for runs and sweeps."""

from __future__ import annotations

import argparse
import logging
import sys

from . import harness

COMMANDS = {
    "run": harness.run_experiment,
    "sweep-layers": harness.sweep_layers,
    "sweep-atoms": harness.sweep_atoms,
    "sweep-users": harness.sweep_users,
    "ablate-delay": harness.ablate_delay,
}


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--seed", type=int, metavar="N", help="single seed")
    group.add_argument(
        "--seeds", metavar="N1,N2,...", help="comma-separated seed list"
    )
    parser.add_argument(
        "--algo",
        choices=sorted(harness.OPTIMIZERS),
        help="restrict to one algorithm",
    )
    parser.add_argument("--out", metavar="DIR", help="output root directory")
    parser.add_argument(
        "--paper-scale",
        action="store_true",
        help="full-scale episodes/steps and network widths",
    )
    parser.add_argument("--episodes", type=int, metavar="N")
    parser.add_argument("--steps", type=int, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simbeam",
        description=(
            "Metasurface downlink simulator: train and benchmark joint "
            "phase/power optimizers."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common_args(sub.add_parser(name))
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seeds"] = [args.seed]
    if args.seeds:
        try:
            seeds = [int(part) for part in args.seeds.split(",") if part.strip()]
        except ValueError as exc:
            raise SystemExit(f"bad --seeds value {args.seeds!r}: {exc}")
        overrides["seeds"] = seeds
    if args.algo:
        overrides["algorithm"] = args.algo
        overrides["algorithms"] = [args.algo]
    if args.out:
        overrides["output_dir"] = args.out
    if args.paper_scale:
        overrides["paper_scale"] = True
    if args.episodes is not None:
        overrides["episodes"] = args.episodes
    if args.steps is not None:
        overrides["steps_per_episode"] = args.steps
    return overrides


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        config = harness.load_config(args.config, _overrides_from_args(args))
        run_dir, _ = COMMANDS[args.command](config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(run_dir)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
