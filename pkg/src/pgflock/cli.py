"""Command-line harness: validate, single runs, and batch sweeps."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .harness import run_single, run_sweep
from .metrics import read_metrics_csv


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simcli",
        description="Vision-based collective motion simulator and sweep harness",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the base configuration once")
    run_p.add_argument("config")
    run_p.add_argument("--seed", type=int, default=None, help="override master seed")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--traj", action="store_true", help="dump the trajectory CSV")

    sweep_p = sub.add_parser("sweep", help="run the full sweep grid x trials")
    sweep_p.add_argument("config")
    sweep_p.add_argument("--seed", type=int, default=None, help="override master seed")
    sweep_p.add_argument("--out", default=None, help="output directory")
    sweep_p.add_argument("--jobs", type=int, default=1, help="parallel trial workers")

    val_p = sub.add_parser("validate", help="parse and validate a configuration")
    val_p.add_argument("config")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    if args.command == "validate":
        n_cells = len(spec.cells())
        print(f"ok: model={spec.base.model.value} robots={spec.base.n_robots} "
              f"cells={n_cells} trials={spec.trials}")
        return 0

    out_dir = args.out if args.out is not None else spec.output_dir

    if args.command == "run":
        try:
            path = run_single(spec, out_dir, seed=args.seed, trajectory=args.traj)
        except OSError as e:
            print(f"i/o error: {e}", file=sys.stderr)
            return 1
        arr = read_metrics_csv(path)
        if arr.shape[0]:
            print(f"wrote {path}: {arr.shape[0]} ticks, "
                  f"final order {arr[-100:, 1].mean():.4f}")
        else:
            print(f"wrote {path}: empty run")
        return 0

    try:
        summary = run_sweep(spec, out_dir, jobs=args.jobs, seed=args.seed)
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
