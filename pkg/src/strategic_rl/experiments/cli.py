"""Command-line entry point: ``strategic-rl run|aggregate|solve``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..game import GameFormatError, GameValidationError, load, minimax_values
from .aggregate import aggregate
from .config import ConfigError, load_config
from .harness import OUT_ENV, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


def _fmt(p: np.ndarray) -> str:
    return "[" + " ".join(f"{x:.6g}" for x in p) + "]"


def cmd_run(args) -> int:
    config = load_config(args.config)
    path = run_experiment(config, args.out, True if args.audit else None)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_aggregate(args) -> int:
    summary, solve = aggregate(args.csv, args.out)
    print(f"wrote {summary}")
    print(f"wrote {solve}")
    return EXIT_OK


def cmd_solve(args) -> int:
    game = load(args.game)
    values, pair = minimax_values(game)
    print(f"value {values[0][game.initial_index]!r}")
    for h, layout in enumerate(game.layouts):
        for s in np.flatnonzero(game.reachable[h]):
            print(f"step {h + 1} state {layout.names[s]} value {values[h][s]:.6g} "
                  f"max {_fmt(pair.explore_max[h, s])} min {_fmt(pair.explore_min[h, s])}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strategic-rl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help=f"CSV path (default: config 'output', else ${OUT_ENV}/<name>.csv)")
    run.add_argument("--audit", action="store_true", help="audit every exploration pair")
    run.set_defaults(func=cmd_run)

    agg = sub.add_parser("aggregate", help="summarise metric CSVs across seeds")
    agg.add_argument("csv", nargs="+")
    agg.add_argument("--out", required=True)
    agg.set_defaults(func=cmd_aggregate)

    solve = sub.add_parser("solve", help="minimax value and equilibrium of a serialized game")
    solve.add_argument("--game", required=True)
    solve.set_defaults(func=cmd_solve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GameFormatError, GameValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
