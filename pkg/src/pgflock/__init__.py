"""Vision-based collective motion simulator with pause-and-go fault tolerance."""

from .behavior import (
    InteractionRule,
    ModelKind,
    ModelParams,
    PGConfig,
    recommended_sense_range,
)
from .engine import RunResult, WorldConfig, init_world, run, tick
from .estimation import BodyDims
from .kinematics import ControlGains, FaultKind
from .vision import OcclusionPolicy

__version__ = "0.1.0"

__all__ = [
    "BodyDims",
    "ControlGains",
    "FaultKind",
    "InteractionRule",
    "ModelKind",
    "ModelParams",
    "OcclusionPolicy",
    "PGConfig",
    "RunResult",
    "WorldConfig",
    "init_world",
    "recommended_sense_range",
    "run",
    "tick",
    "__version__",
]
