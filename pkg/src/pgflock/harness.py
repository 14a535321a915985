"""Batch execution: sweep grids, trial seeding, CSV emission.

Every (cell, trial) pair gets a child seed derived purely from the master
seed and the two indices, so any cell can be reproduced in isolation and
results are independent of worker count.  Outputs per sweep directory:

    cell_000/trial_000.csv ...   per-trial metrics series
    summary.csv                  one row per cell with aggregate statistics
    DONE                         sentinel written only after full success
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .config import ExperimentSpec
from .engine import run
from .metrics import final_order, records_to_array, window_speed, write_metrics_csv
from .rng import TAG_TRIAL, derive_seed

TRAJECTORY_COLUMNS = ("tick", "robot_id", "x", "y", "heading", "state", "health")


def child_seed(master: int, cell_index: int, trial_index: int) -> int:
    """Deterministic per-trial seed; pure function of its arguments."""
    return derive_seed(master, TAG_TRIAL, cell_index, trial_index)


@dataclass(frozen=True)
class TrialStats:
    cell: int
    trial: int
    final_order: float
    mean_speed: float
    fp_per_cycle: float


def _trial_job(args) -> TrialStats:
    cfg, cell, trial, out_path = args
    result = run(cfg)
    if out_path is not None:
        write_metrics_csv(out_path, result.records)
    arr = records_to_array(result.records)
    return TrialStats(
        cell=cell,
        trial=trial,
        final_order=final_order(arr) if arr.size else 0.0,
        mean_speed=window_speed(arr) if arr.size else 0.0,
        fp_per_cycle=float(arr[-1, 4]) if arr.size else 0.0,
    )


def _format_cell_value(value) -> str:
    if isinstance(value, (list, tuple)):
        return "-".join(str(v) for v in value)
    return str(value)


def run_trials(
    spec: ExperimentSpec,
    jobs: int = 1,
    seed: int | None = None,
    out_dir: Path | None = None,
) -> list[TrialStats]:
    """Run every (cell, trial) pair; optionally write per-trial CSVs.

    Trial order in the result is deterministic and independent of jobs.
    """
    master = spec.seed if seed is None else seed
    tasks = []
    for ci, overrides in enumerate(spec.cells()):
        cfg = spec.cell_config(overrides)
        cell_dir = None
        if out_dir is not None:
            cell_dir = out_dir / f"cell_{ci:03d}"
            cell_dir.mkdir(parents=True, exist_ok=True)
        for ti in range(spec.trials):
            trial_cfg = replace(cfg, seed=child_seed(master, ci, ti))
            out_path = cell_dir / f"trial_{ti:03d}.csv" if cell_dir else None
            tasks.append((trial_cfg, ci, ti, out_path))

    if jobs <= 1:
        stats = [_trial_job(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            stats = list(pool.map(_trial_job, tasks, chunksize=1))
    return sorted(stats, key=lambda s: (s.cell, s.trial))


def run_sweep(
    spec: ExperimentSpec,
    out_dir: str | Path,
    jobs: int = 1,
    seed: int | None = None,
    write_trials: bool = True,
) -> Path:
    """Execute the full grid x trials and emit per-trial plus summary CSVs.

    Returns the path of the summary file.  The DONE sentinel appears only
    when everything was written; its absence flags a partial output tree.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    done_path = out_dir / "DONE"
    done_path.unlink(missing_ok=True)

    cells = spec.cells()
    stats = run_trials(spec, jobs=jobs, seed=seed,
                       out_dir=out_dir if write_trials else None)

    by_cell: dict[int, list[TrialStats]] = {}
    for s in stats:
        by_cell.setdefault(s.cell, []).append(s)

    sweep_keys = [k for k, _ in spec.sweep]
    summary_path = out_dir / "summary.csv"
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cell", *sweep_keys, "trials",
                    "mean_final_order", "se_order", "mean_fp_per_cycle", "mean_speed"])
        for ci, overrides in enumerate(cells):
            rows = by_cell[ci]
            orders = [s.final_order for s in rows]
            mean_order = sum(orders) / len(orders)
            if len(orders) > 1:
                var = sum((o - mean_order) ** 2 for o in orders) / (len(orders) - 1)
                se = math.sqrt(var / len(orders))
            else:
                se = 0.0
            mean_fp = sum(s.fp_per_cycle for s in rows) / len(rows)
            mean_speed = sum(s.mean_speed for s in rows) / len(rows)
            w.writerow([
                ci,
                *[_format_cell_value(overrides[k]) for k in sweep_keys],
                len(rows), repr(mean_order), repr(se), repr(mean_fp),
                repr(mean_speed),
            ])

    done_path.write_text("ok\n")
    return summary_path


def run_single(
    spec: ExperimentSpec,
    out_dir: str | Path,
    seed: int | None = None,
    trajectory: bool = False,
) -> Path:
    """One simulation of the base configuration; returns the metrics path."""
    cfg = spec.base if seed is None else replace(spec.base, seed=seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run(cfg, record_trajectory=trajectory)
    metrics_path = out_dir / "metrics.csv"
    write_metrics_csv(metrics_path, result.records)
    if trajectory:
        with open(out_dir / "trajectory.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRAJECTORY_COLUMNS)
            for row in result.trajectory:
                tick_i, rid, x, y, h, state, health = row
                w.writerow([tick_i, rid, repr(x), repr(y), repr(h), state, health])
    return metrics_path
