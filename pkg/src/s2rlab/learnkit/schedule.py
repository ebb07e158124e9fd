"""Learning-rate schedule: linear warmup, cosine decay, constant floor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LrSchedule:
    base_lr: float = 1e-4
    warmup_steps: int = 1000
    cosine_decay_steps: int = 100_000
    min_lr: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.min_lr <= self.base_lr:
            raise ValueError("need 0 < min_lr <= base_lr")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be >= 0")


def lr_at(schedule: LrSchedule, step: int) -> float:
    """Learning rate at an integer optimizer step (step >= 0)."""
    if step < 0:
        raise ValueError("step must be >= 0")
    if schedule.warmup_steps > 0 and step < schedule.warmup_steps:
        return schedule.base_lr * step / schedule.warmup_steps
    t = step - schedule.warmup_steps
    if t >= schedule.cosine_decay_steps:
        return schedule.min_lr
    span = schedule.base_lr - schedule.min_lr
    return schedule.min_lr + 0.5 * span * (1.0 + np.cos(np.pi * t / schedule.cosine_decay_steps))
