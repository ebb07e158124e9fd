"""Minimal differentiable building blocks: dense nets, GMM and classifier
heads, Adam, LR schedules, and a finite-difference gradient oracle."""

from .nets import ACTIVATIONS, Dense, DenseNet, LabelEmbedding, PointEncoder
from .gmm import GmmHead
from .losses import bce_loss, sigmoid
from .optim import OptimState, adam_step
from .schedule import LrSchedule, lr_at
from .gradcheck import finite_diff_grad, relative_error
from .checkpoint import (
    array_from_json,
    array_to_json,
    checkpoint_hash,
    load_checkpoint,
    net_from_json,
    net_to_json,
    save_checkpoint,
)

__all__ = [
    "ACTIVATIONS",
    "Dense",
    "DenseNet",
    "LabelEmbedding",
    "PointEncoder",
    "GmmHead",
    "bce_loss",
    "sigmoid",
    "OptimState",
    "adam_step",
    "LrSchedule",
    "lr_at",
    "finite_diff_grad",
    "relative_error",
    "array_from_json",
    "array_to_json",
    "checkpoint_hash",
    "load_checkpoint",
    "net_from_json",
    "net_to_json",
    "save_checkpoint",
]
