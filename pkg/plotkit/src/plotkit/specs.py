"""Plot specification files: parsing and validation.

A spec is a small YAML mapping:

    kind: order_curve | error_curve | speed_bars | sweep_table
    inputs: [path-or-glob, ...]
    output: figure path (.png or .svg)
    group_by: [columns]        # meaning depends on kind, see render.py
    summary: path              # order_curve: sweep summary for legend labels
    value: column              # speed_bars / sweep_table value column

Inputs must exist and conform to the simulator's published CSV schemas;
violations raise SpecError naming the offending field or column.
"""

from __future__ import annotations

import glob
from dataclasses import dataclass, field
from pathlib import Path

import yaml

KINDS = ("order_curve", "error_curve", "speed_bars", "sweep_table")

_ALLOWED_KEYS = {"kind", "inputs", "output", "group_by", "summary", "value"}


class SpecError(ValueError):
    pass


@dataclass
class PlotSpec:
    kind: str
    inputs: list[Path]
    output: Path
    group_by: list[str] = field(default_factory=list)
    summary: Path | None = None
    value: str | None = None


def load_plot_spec(path: str | Path) -> PlotSpec:
    path = Path(path)
    if not path.exists():
        raise SpecError(f"spec file not found: {path}")
    raw = yaml.safe_load(path.read_text())
    if not isinstance(raw, dict):
        raise SpecError(f"{path}: top level must be a mapping")
    return build_plot_spec(raw, base_dir=path.parent)


def build_plot_spec(raw: dict, base_dir: Path | None = None) -> PlotSpec:
    base = base_dir or Path(".")
    unknown = set(raw) - _ALLOWED_KEYS
    if unknown:
        raise SpecError(f"unknown keys: {sorted(unknown)}")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise SpecError(f"kind: must be one of {KINDS}, got {kind!r}")
    patterns = raw.get("inputs")
    if not patterns or not isinstance(patterns, list):
        raise SpecError("inputs: need a non-empty list of paths or globs")
    inputs: list[Path] = []
    for pat in patterns:
        p = Path(pat)
        if not p.is_absolute():
            p = base / p
        matches = sorted(glob.glob(str(p)))
        if matches:
            inputs.extend(Path(m) for m in matches)
        elif p.exists():
            inputs.append(p)
    if not inputs:
        raise SpecError(f"inputs: no files matched {patterns}")
    output = raw.get("output")
    if not output:
        raise SpecError("output: required")
    out = Path(output)
    if not out.is_absolute():
        out = base / out
    summary = raw.get("summary")
    if summary is not None:
        summary = Path(summary)
        if not summary.is_absolute():
            summary = base / summary
        if not summary.exists():
            raise SpecError(f"summary: file not found: {summary}")
    return PlotSpec(
        kind=kind,
        inputs=inputs,
        output=out,
        group_by=list(raw.get("group_by", [])),
        summary=summary,
        value=raw.get("value"),
    )
