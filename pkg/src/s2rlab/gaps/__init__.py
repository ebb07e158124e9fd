"""Controlled sim-to-real gap injectors wrapped around the planar world."""

from .config import GAP_VARIANTS, GapConfig
from .wrappers import (
    PerceptionErrorGap,
    UnderactuatedGap,
    perturb_cloud,
    underactuate,
    wrap,
)

__all__ = [
    "GAP_VARIANTS",
    "GapConfig",
    "PerceptionErrorGap",
    "UnderactuatedGap",
    "perturb_cloud",
    "underactuate",
    "wrap",
]
