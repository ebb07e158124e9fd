"""Residual policy learning and gated deployment."""

from .algebra import ResidualAction, apply_residual, residual_target, xnor
from .deploy import GATE_MODES, GatedPolicy, deploy
from .policy import ResidualConfig, ResidualPolicy
from .train import ResidualResult, ResidualTrainConfig, train_residual

__all__ = [
    "ResidualAction",
    "apply_residual",
    "residual_target",
    "xnor",
    "GATE_MODES",
    "GatedPolicy",
    "deploy",
    "ResidualConfig",
    "ResidualPolicy",
    "ResidualResult",
    "ResidualTrainConfig",
    "train_residual",
]
