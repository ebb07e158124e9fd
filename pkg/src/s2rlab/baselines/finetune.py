"""Comparison learners over the shared correction data.

All four methods produce student-architecture checkpoints and consume the
same session logs / demonstration sets; they differ only in which steps
they train on and how those steps are weighted.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ..distill.dataset import stack_rows
from ..distill.student import StudentConfig, StudentPolicy
from ..hitl.records import SessionLog, SessionStep
from ..learnkit import LrSchedule, OptimState, adam_step, lr_at


@dataclass
class WeightedSample:
    """(observation, action) pair with a sampling weight and provenance."""

    cloud: list
    proprio: list
    target_q: list
    target_grip: int
    weight: float
    source: str  # "robot" | "human"

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError("sample weight must be positive")
        if self.source not in ("robot", "human"):
            raise ValueError(f"unknown source {self.source!r}")

    def row(self) -> dict:
        return {
            "cloud": self.cloud,
            "proprio": self.proprio,
            "target_q": self.target_q,
            "target_grip": self.target_grip,
        }


@dataclass(frozen=True)
class FinetuneConfig:
    steps: int = 2100
    batch_size: int = 16
    schedule: LrSchedule = field(default_factory=lambda: LrSchedule(base_lr=1e-4))

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "batch_size": self.batch_size,
            "schedule": self.schedule.__dict__.copy(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FinetuneConfig":
        d = dict(d)
        d["schedule"] = LrSchedule(**d["schedule"])
        return cls(**d)


def _step_sample(step: SessionStep, weight: float, source: str) -> WeightedSample:
    return WeightedSample(
        cloud=step.cloud,
        proprio=step.proprio,
        target_q=list(step.action[:-1]),
        target_grip=int(step.action[-1]),
        weight=weight,
        source=source,
    )


def human_samples(log: SessionLog, weight: float = 1.0) -> list[WeightedSample]:
    return [_step_sample(s, weight, "human") for s in log.intervened_steps()]


def robot_samples(log: SessionLog, weight: float = 1.0) -> list[WeightedSample]:
    return [_step_sample(s, weight, "robot") for s in log.robot_steps()]


def fit_on_samples(
    policy: StudentPolicy,
    samples: list[WeightedSample],
    cfg: FinetuneConfig,
    seed: int = 0,
) -> tuple[StudentPolicy, list[dict]]:
    """Weighted-resampling BC: per batch, indices are drawn with probability
    proportional to sample weight. Returns the trained policy and a per-step
    audit of how many samples of each source entered each batch."""
    if not samples:
        raise ValueError("no training samples")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xF17]))
    optim = OptimState.for_params(policy.params())
    rows = [s.row() for s in samples]
    weights = np.array([s.weight for s in samples], dtype=np.float64)
    probs = weights / weights.sum()
    sources = np.array([s.source == "human" for s in samples])
    audit = []
    for step in range(cfg.steps):
        idx = rng.choice(len(rows), size=cfg.batch_size, replace=True, p=probs)
        batch = stack_rows(rows, idx)
        policy.zero_grads()
        nll, bce = policy.bc_loss(*batch)
        adam_step(policy.params(), policy.grads(), optim, lr_at(cfg.schedule, step))
        audit.append(
            {"step": step, "loss": nll + bce, "human_in_batch": int(sources[idx].sum())}
        )
    return policy, audit


def clone_student(policy: StudentPolicy) -> StudentPolicy:
    return StudentPolicy.from_modules(copy.deepcopy(policy.to_modules()))


def train_bc(
    demos: SessionLog, student_cfg: StudentConfig, cfg: FinetuneConfig, seed: int = 0
) -> tuple[StudentPolicy, list[dict]]:
    """From-scratch BC on full human demonstrations (always-teleop sessions)."""
    samples = human_samples(demos)
    if not samples:
        raise ValueError("demonstration log holds no human steps")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xBC]))
    policy = StudentPolicy.create(student_cfg, rng)
    return fit_on_samples(policy, samples, cfg, seed)


def bc_finetune(
    base: StudentPolicy, log: SessionLog, cfg: FinetuneConfig, seed: int = 0
) -> tuple[StudentPolicy, list[dict]]:
    """Continue the base checkpoint on human correction steps, unweighted."""
    samples = human_samples(log)
    if not samples:
        raise ValueError("no human correction steps to fine-tune on")
    return fit_on_samples(clone_student(base), samples, cfg, seed)


def train_hg_dagger(
    base: StudentPolicy, log: SessionLog, cfg: FinetuneConfig, seed: int = 0
) -> tuple[StudentPolicy, list[dict]]:
    """Fine-tune on intervention steps only (robot data discarded)."""
    samples = human_samples(log)
    if not samples:
        raise ValueError("session log holds no human steps")
    return fit_on_samples(clone_student(base), samples, cfg, seed)


def train_iwr(
    base: StudentPolicy, log: SessionLog, cfg: FinetuneConfig, seed: int = 0
) -> tuple[StudentPolicy, list[dict]]:
    """Fine-tune on all steps with human samples up-weighted by
    alpha = |robot steps| / |human steps|."""
    human = human_samples(log)
    robot = robot_samples(log)
    if not human or not robot:
        raise ValueError("IWR needs both human and robot steps")
    alpha = len(robot) / len(human)
    samples = [
        WeightedSample(s.cloud, s.proprio, s.target_q, s.target_grip, alpha, "human")
        for s in human
    ] + robot
    return fit_on_samples(clone_student(base), samples, cfg, seed)
