"""The four figure styles, rendered deterministically from CSVs.

* order_curve: per-tick order, mean line with a standard-error band per
  group.  Trial files group by their parent directory (the harness's
  cell_### layout); a sweep summary relabels groups by parameter values.
* error_curve: estimator error against relative orientation, one line per
  method column.
* speed_bars: grouped bars of a summary column, clusters by the first
  group column, bar series by the second.
* sweep_table: a parameter-grid table of a summary column.

Outputs are pixel-deterministic for a given matplotlib version: fixed
figure geometry, Agg/SVG backends, no timestamps embedded.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .specs import PlotSpec, SpecError

matplotlib.rcParams["svg.hashsalt"] = "plotkit"

METRICS_COLUMNS = ["tick", "order", "mean_speed", "centroid_speed",
                   "fp_per_cycle", "n_components"]

_FIGSIZE = (6.4, 4.0)
_DPI = 120


def render(spec: PlotSpec) -> Path:
    """Render one spec to its output path and return the path."""
    fig = {
        "order_curve": _order_curve,
        "error_curve": _error_curve,
        "speed_bars": _speed_bars,
        "sweep_table": _sweep_table,
    }[spec.kind](spec)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    save_kwargs = {"dpi": _DPI}
    if spec.output.suffix == ".svg":
        save_kwargs["metadata"] = {"Date": None}
    fig.savefig(spec.output, **save_kwargs)
    plt.close(fig)
    return spec.output


def _read_csv(path: Path, required: list[str]) -> pd.DataFrame:
    df = pd.read_csv(path)
    if df.empty:
        raise SpecError(f"{path}: no data rows")
    for col in required:
        if col not in df.columns:
            raise SpecError(f"{path}: missing column '{col}'")
    return df


def _group_labels(spec: PlotSpec, groups: list[str]) -> dict[str, str]:
    """Map cell directory names to legend labels via the sweep summary."""
    labels = {g: g for g in groups}
    if spec.summary is None:
        return labels
    summary = _read_csv(spec.summary, ["cell"])
    for col in spec.group_by:
        if col not in summary.columns:
            raise SpecError(f"{spec.summary}: missing column '{col}'")
    for g in groups:
        if g.startswith("cell_"):
            try:
                idx = int(g.split("_", 1)[1])
            except ValueError:
                continue
            row = summary[summary["cell"] == idx]
            if len(row) == 1 and spec.group_by:
                labels[g] = ", ".join(
                    f"{c}={row.iloc[0][c]}" for c in spec.group_by
                )
    return labels


def _order_curve(spec: PlotSpec):
    by_group: OrderedDict[str, list[pd.DataFrame]] = OrderedDict()
    for path in spec.inputs:
        df = _read_csv(path, METRICS_COLUMNS)
        by_group.setdefault(path.parent.name, []).append(df)

    labels = _group_labels(spec, list(by_group))
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for group, frames in by_group.items():
        ticks = frames[0]["tick"].to_numpy()
        stack = np.stack([f["order"].to_numpy() for f in frames])
        mean = stack.mean(axis=0)
        ax.plot(ticks, mean, label=labels[group], linewidth=1.2)
        if stack.shape[0] > 1:
            se = stack.std(axis=0, ddof=1) / math.sqrt(stack.shape[0])
            ax.fill_between(ticks, mean - se, mean + se, alpha=0.25, linewidth=0)
    ax.set_xlabel("tick")
    ax.set_ylabel("order")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    return fig


def _error_curve(spec: PlotSpec):
    if len(spec.inputs) != 1:
        raise SpecError("error_curve expects exactly one input CSV")
    df = _read_csv(spec.inputs[0], ["phi_deg"])
    columns = spec.group_by or [c for c in df.columns if c != "phi_deg"]
    for col in columns:
        if col not in df.columns:
            raise SpecError(f"{spec.inputs[0]}: missing column '{col}'")
    if not columns:
        raise SpecError("error_curve: no method columns to plot")
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for col in columns:
        ax.plot(df["phi_deg"], df[col], label=col, linewidth=1.2)
    ax.set_xlabel("relative orientation (deg)")
    ax.set_ylabel("estimated distance error (m)")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig


def _speed_bars(spec: PlotSpec):
    if len(spec.inputs) != 1:
        raise SpecError("speed_bars expects exactly one summary CSV")
    if len(spec.group_by) != 2:
        raise SpecError("speed_bars: group_by needs [cluster_column, series_column]")
    value = spec.value or "mean_speed"
    cluster_col, series_col = spec.group_by
    df = _read_csv(spec.inputs[0], [cluster_col, series_col, value])

    clusters = list(dict.fromkeys(df[cluster_col]))
    series = list(dict.fromkeys(df[series_col]))
    width = 0.8 / len(series)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    x = np.arange(len(clusters), dtype=float)
    for k, s in enumerate(series):
        heights = []
        for c in clusters:
            rows = df[(df[cluster_col] == c) & (df[series_col] == s)]
            heights.append(rows[value].mean() if len(rows) else 0.0)
        ax.bar(x + (k - (len(series) - 1) / 2) * width, heights, width,
               label=f"{series_col}={s}")
    ax.set_xticks(x)
    ax.set_xticklabels([str(c) for c in clusters])
    ax.set_xlabel(cluster_col)
    ax.set_ylabel(value)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig


def _sweep_table(spec: PlotSpec):
    if len(spec.inputs) != 1:
        raise SpecError("sweep_table expects exactly one summary CSV")
    if len(spec.group_by) != 2:
        raise SpecError("sweep_table: group_by needs [row_column, column_column]")
    value = spec.value or "mean_final_order"
    row_col, col_col = spec.group_by
    df = _read_csv(spec.inputs[0], [row_col, col_col, value])

    rows = list(dict.fromkeys(df[row_col]))
    cols = list(dict.fromkeys(df[col_col]))
    cell_text = []
    for r in rows:
        line = []
        for c in cols:
            sel = df[(df[row_col] == r) & (df[col_col] == c)]
            line.append(f"{sel[value].mean():.3f}" if len(sel) else "-")
        cell_text.append(line)

    height = 1.2 + 0.28 * len(rows)
    fig, ax = plt.subplots(figsize=(_FIGSIZE[0], height))
    ax.axis("off")
    table = ax.table(
        cellText=cell_text,
        rowLabels=[str(r) for r in rows],
        colLabels=[str(c) for c in cols],
        loc="center",
    )
    table.auto_set_font_size(False)
    table.set_fontsize(8)
    ax.set_title(f"{value}: {row_col} x {col_col}", fontsize=10)
    fig.tight_layout()
    return fig
