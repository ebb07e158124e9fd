"""Interactive-IL and fine-tuning baselines over shared datasets."""

from .finetune import (
    FinetuneConfig,
    WeightedSample,
    bc_finetune,
    clone_student,
    fit_on_samples,
    human_samples,
    robot_samples,
    train_bc,
    train_hg_dagger,
    train_iwr,
)

__all__ = [
    "FinetuneConfig",
    "WeightedSample",
    "bc_finetune",
    "clone_student",
    "fit_on_samples",
    "human_samples",
    "robot_samples",
    "train_bc",
    "train_hg_dagger",
    "train_iwr",
]
