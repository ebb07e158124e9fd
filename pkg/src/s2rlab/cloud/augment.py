"""Training-time augmentation for clouds and proprioception."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .synth import LabeledPointCloud


@dataclass(frozen=True)
class AugmentConfig:
    probability: float = 0.4
    translation_range: float = 0.04
    jitter_ratio: float = 0.1
    jitter_std: float = 0.01
    jitter_clip: float = 0.015
    proprio_std: float = 0.1
    proprio_clip: float = 0.3

    def to_dict(self) -> dict:
        return self.__dict__.copy()

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentConfig":
        return cls(**d)


def augment(
    cloud: LabeledPointCloud, rng: np.random.Generator, cfg: AugmentConfig = AugmentConfig()
) -> LabeledPointCloud:
    """Random global translation and point jitter, each applied with
    probability ``cfg.probability`` independently. Labels are untouched."""
    points = cloud.points.copy()
    if rng.uniform() < cfg.probability:
        points += rng.uniform(-cfg.translation_range, cfg.translation_range, size=2)
    if rng.uniform() < cfg.probability:
        n = points.shape[0]
        count = int(np.floor(cfg.jitter_ratio * n))
        if count > 0:
            idx = rng.choice(n, size=count, replace=False)
            noise = rng.normal(0.0, cfg.jitter_std, size=(count, 2))
            points[idx] += np.clip(noise, -cfg.jitter_clip, cfg.jitter_clip)
    return LabeledPointCloud(points, cloud.labels.copy())


def proprio_noise(
    obs: np.ndarray, rng: np.random.Generator, cfg: AugmentConfig = AugmentConfig()
) -> np.ndarray:
    """Additive clipped Gaussian noise on the proprioceptive vector."""
    if cfg.proprio_std == 0.0:
        return obs.copy()
    noise = rng.normal(0.0, cfg.proprio_std, size=obs.shape)
    return obs + np.clip(noise, -cfg.proprio_clip, cfg.proprio_clip)
