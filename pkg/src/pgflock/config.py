"""Experiment configuration: YAML loading, validation, and sweep grids.

A config file is a flat YAML mapping whose keys mirror the model's
nomenclature (r_d, r_sense, k_f, u_max, ...).  Every omitted key takes its
standard default, so an empty file describes the stock 40-robot AA-V run.
An optional `sweep` section maps field names to value lists; the grid is
their cartesian product in declaration order.  Unknown keys are rejected.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import yaml

from .behavior import InteractionRule, ModelKind, ModelParams, PGConfig
from .engine import WorldConfig
from .estimation import BodyDims
from .kinematics import ControlGains, FaultKind
from .vision import OcclusionPolicy

DEFAULTS: dict = {
    "model": "aav",
    "occlusion": "complid",
    "n_robots": 40,
    "ticks": 12000,
    "seed": 1,
    "trials": 50,
    "output_dir": "out",
    "r_d": 0.10,
    "r_sense": 0.19,
    "k_f": 1.0,
    "k_1": 2.5,
    "k_2": 0.06,
    "k_3": 1.5,
    "u_forward": 0.0175,
    "u_max": 0.035,
    "omega_lim": 0.5236,
    "wheelbase": 0.018,
    "length": 0.05,
    "width": 0.02,
    "height": 0.027,
    "eps_match": 1e-6,
    "init_area": 0.5,
    "faulty_fraction": 0.0,
    "fault_kind": "stuck",
    "slowdown_factor": 0.3,
    "fault_onset_tick": 0,
    "pause": [6, 7],
    "go": [11, 20],
    "u_min": 0.0,
    "theta_min": 0.0,
    "interaction": "avoid_half_time",
    "p_faulty": 0.5,
}


class ConfigError(ValueError):
    pass


def _schema() -> dict:
    text = resources.files("pgflock").joinpath("config.schema.json").read_text()
    return json.loads(text)


def validate_raw(raw: dict) -> None:
    """Schema-validate a raw mapping; errors carry the offending key path."""
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as e:
        path = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {e.message}") from None


def build_world_config(raw: dict) -> WorldConfig:
    """Merge raw values over the defaults and build a validated WorldConfig."""
    merged = {**DEFAULTS, **raw}
    merged.pop("sweep", None)
    merged.pop("trials", None)
    merged.pop("output_dir", None)

    def fail(key: str, msg: str):
        raise ConfigError(f"{key}: {msg}")

    if merged["r_d"] >= merged["r_sense"]:
        fail("r_d", f"must be below r_sense ({merged['r_d']} >= {merged['r_sense']})")
    if merged["length"] <= merged["width"]:
        fail("length", "body length must exceed body width")
    if merged["u_forward"] > merged["u_max"]:
        fail("u_forward", "forward bias cannot exceed u_max")
    for key in ("pause", "go"):
        lo, hi = merged[key]
        if not 0 < lo < hi:
            fail(key, f"need 0 < min < max, got [{lo}, {hi})")
    if int(merged["faulty_fraction"] * merged["n_robots"]) >= merged["n_robots"]:
        fail("faulty_fraction", "at least one robot must stay nominal")

    return WorldConfig(
        n_robots=merged["n_robots"],
        model=ModelKind(merged["model"]),
        occlusion=OcclusionPolicy(merged["occlusion"]),
        params=ModelParams(
            r_d=merged["r_d"], r_sense=merged["r_sense"],
            k_f=merged["k_f"], k_3=merged["k_3"],
        ),
        gains=ControlGains(
            k1=merged["k_1"], k2=merged["k_2"],
            u_forward=merged["u_forward"], u_max=merged["u_max"],
            omega_lim=merged["omega_lim"], wheelbase=merged["wheelbase"],
        ),
        dims=BodyDims(
            length=merged["length"], width=merged["width"],
            height=merged["height"], eps=merged["eps_match"],
        ),
        pg=PGConfig(
            pause=tuple(merged["pause"]), go=tuple(merged["go"]),
            u_min=merged["u_min"], theta_min=merged["theta_min"],
            interaction=InteractionRule(merged["interaction"]),
            p_faulty=merged["p_faulty"],
        ),
        faulty_fraction=merged["faulty_fraction"],
        fault_kind=FaultKind(merged["fault_kind"]),
        slowdown_factor=merged["slowdown_factor"],
        fault_onset_tick=merged["fault_onset_tick"],
        init_area=merged["init_area"],
        ticks=merged["ticks"],
        seed=merged["seed"],
    )


@dataclass
class ExperimentSpec:
    """A base configuration plus an optional sweep grid and trial count."""

    raw: dict
    base: WorldConfig
    sweep: list[tuple[str, list]]
    trials: int
    output_dir: str
    seed: int

    def cells(self) -> list[dict]:
        """Grid of per-cell overrides, cartesian product in axis order."""
        if not self.sweep:
            return [{}]
        keys = [k for k, _ in self.sweep]
        values = [v for _, v in self.sweep]
        return [dict(zip(keys, combo)) for combo in itertools.product(*values)]

    def cell_config(self, overrides: dict) -> WorldConfig:
        return build_world_config({**self.raw, **overrides})


def load_config(path: str | Path) -> ExperimentSpec:
    """Parse and fully validate one experiment file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"could not parse {path}: {e}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return load_spec(raw)


def load_spec(raw: dict) -> ExperimentSpec:
    validate_raw(raw)
    sweep = [(k, list(v)) for k, v in raw.get("sweep", {}).items()]
    base = build_world_config(raw)
    spec = ExperimentSpec(
        raw={k: v for k, v in raw.items() if k != "sweep"},
        base=base,
        sweep=sweep,
        trials=raw.get("trials", DEFAULTS["trials"]),
        output_dir=raw.get("output_dir", DEFAULTS["output_dir"]),
        seed=raw.get("seed", DEFAULTS["seed"]),
    )
    for overrides in spec.cells():
        spec.cell_config(overrides)  # reject invalid cells up front
    return spec
