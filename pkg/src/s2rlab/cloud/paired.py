"""Matched sim/"real" cloud pairs for feature regularization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .synth import LabeledPointCloud

DEFAULT_PAIR_COUNT = 59


@dataclass
class PairedCloudSet:
    """Aligned (sim, real) cloud pairs of identical scenes."""

    sim: list[LabeledPointCloud]
    real: list[LabeledPointCloud]

    def __post_init__(self):
        if len(self.sim) != len(self.real):
            raise ValueError("sim/real pair counts differ")

    def __len__(self) -> int:
        return len(self.sim)

    def to_rows(self) -> list[dict]:
        return [
            {"sim": s.to_flat(), "real": r.to_flat()}
            for s, r in zip(self.sim, self.real)
        ]

    @classmethod
    def from_rows(cls, rows) -> "PairedCloudSet":
        sim = [LabeledPointCloud.from_flat(r["sim"]) for r in rows]
        real = [LabeledPointCloud.from_flat(r["real"]) for r in rows]
        return cls(sim, real)


def collect_paired_set(
    sim_env, real_env, n_scenes: int = DEFAULT_PAIR_COUNT, seed: int = 0
) -> PairedCloudSet:
    """Reset both environments on shared scene seeds and record cloud pairs."""
    sims, reals = [], []
    for i in range(n_scenes):
        scene_seed = seed + i
        obs_sim = sim_env.reset(scene_seed)
        obs_real = real_env.reset(scene_seed)
        sims.append(obs_sim.cloud.clone())
        reals.append(obs_real.cloud.clone())
    return PairedCloudSet(sims, reals)
