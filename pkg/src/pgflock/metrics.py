"""Order, speed, misclassification, and connectivity metrics plus CSV I/O.

Faulty robots are excluded from order and speed: the point is whether the
healthy part of the swarm stays coherent.  The summary statistic for a run
is the mean order over the last 100 ticks, the mean speed over the second
half of the run, and the running mean of false positives per completed
pause cycle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

METRICS_COLUMNS = ("tick", "order", "mean_speed", "centroid_speed",
                   "fp_per_cycle", "n_components")

FINAL_ORDER_WINDOW = 100


@dataclass(frozen=True)
class TickRecord:
    tick: int
    order: float
    mean_speed: float
    centroid_speed: float
    fp_per_cycle: float
    n_components: int


def order(headings: Sequence[float] | np.ndarray) -> float:
    """Norm of the mean unit-heading vector; 1 = aligned, 0 = disordered."""
    h = np.asarray(headings, dtype=float)
    if h.size == 0:
        raise ValueError("order parameter undefined for zero robots")
    return float(np.hypot(np.cos(h).mean(), np.sin(h).mean()))


def mean_speed(displacements: np.ndarray, dt: float) -> float:
    """Mean per-tick displacement magnitude over the given robots, in m/s."""
    d = np.asarray(displacements, dtype=float).reshape(-1, 2)
    if d.shape[0] == 0:
        raise ValueError("mean speed undefined for zero robots")
    return float(np.hypot(d[:, 0], d[:, 1]).mean() / dt)


def false_positive_tally(faulty_set: Iterable[int], truly_faulty: Sequence[bool]) -> int:
    """Count ground-truth-nominal robots in one observer's faulty set."""
    return sum(1 for j in faulty_set if not truly_faulty[j])


def connectivity(positions: np.ndarray, r_sense: float) -> int:
    """Connected components of the graph with edges at center distance
    <= r_sense.  Straightforward union-find; the engine uses a compiled
    twin checked against this one."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = pos.shape[0]
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if math.hypot(pos[j, 0] - pos[i, 0], pos[j, 1] - pos[i, 1]) <= r_sense:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    return sum(1 for i in range(n) if find(i) == i)


def records_to_array(records: Sequence[TickRecord]) -> np.ndarray:
    out = np.empty((len(records), 6), dtype=float)
    for k, r in enumerate(records):
        out[k] = (r.tick, r.order, r.mean_speed, r.centroid_speed,
                  r.fp_per_cycle, r.n_components)
    return out


def write_metrics_csv(path, records: Sequence[TickRecord]) -> None:
    """One row per tick, header mandatory, plain decimal-point formatting."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(METRICS_COLUMNS)
        for r in records:
            w.writerow([r.tick, repr(r.order), repr(r.mean_speed),
                        repr(r.centroid_speed), repr(r.fp_per_cycle),
                        r.n_components])


def read_metrics_csv(path) -> np.ndarray:
    """Metrics CSV back as a (ticks, 6) float array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != METRICS_COLUMNS:
            raise ValueError(f"unexpected metrics header: {header}")
        rows = [[float(v) for v in row] for row in reader]
    return np.asarray(rows, dtype=float).reshape(-1, 6)


def final_order(records: Sequence[TickRecord] | np.ndarray) -> float:
    """Mean order over the last 100 recorded ticks."""
    arr = records if isinstance(records, np.ndarray) else records_to_array(records)
    if arr.shape[0] == 0:
        raise ValueError("no records")
    return float(arr[-FINAL_ORDER_WINDOW:, 1].mean())


def window_speed(records: Sequence[TickRecord] | np.ndarray) -> float:
    """Mean swarm speed over the second half of the run."""
    arr = records if isinstance(records, np.ndarray) else records_to_array(records)
    if arr.shape[0] == 0:
        raise ValueError("no records")
    return float(arr[arr.shape[0] // 2:, 2].mean())
