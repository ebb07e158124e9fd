"""Behavior-cloning distillation with paired-cloud feature regularization."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ..cloud.augment import AugmentConfig, augment, proprio_noise
from ..cloud.paired import PairedCloudSet
from ..cloud.synth import LabeledPointCloud
from ..learnkit import LrSchedule, OptimState, adam_step, lr_at
from .dataset import stack_rows
from .evaluate import evaluate
from .student import StudentConfig, StudentPolicy


@dataclass(frozen=True)
class DistillConfig:
    steps: int = 3000
    batch_size: int = 32
    beta: float = 1e-3
    paired_batch: int = 8
    schedule: LrSchedule = field(default_factory=lambda: LrSchedule(base_lr=1e-4))
    augment_data: bool = True
    aug: AugmentConfig = field(default_factory=AugmentConfig)
    eval_every: int = 500
    eval_episodes: int = 50
    eval_seed_base: int = 20_000

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "batch_size": self.batch_size,
            "beta": self.beta,
            "paired_batch": self.paired_batch,
            "schedule": self.schedule.__dict__.copy(),
            "augment_data": self.augment_data,
            "aug": self.aug.to_dict(),
            "eval_every": self.eval_every,
            "eval_episodes": self.eval_episodes,
            "eval_seed_base": self.eval_seed_base,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DistillConfig":
        d = dict(d)
        d["schedule"] = LrSchedule(**d["schedule"])
        d["aug"] = AugmentConfig.from_dict(d["aug"])
        return cls(**d)


@dataclass
class StudentResult:
    policy: StudentPolicy
    best_success: float
    curve: list[dict]
    reg_first: float | None
    reg_last: float | None
    losses: list[dict]


class ConfigError(ValueError):
    pass


def _paired_batch(paired: PairedCloudSet, idx: np.ndarray):
    sim = [paired.sim[i] for i in idx]
    real = [paired.real[i] for i in idx]
    return (
        np.stack([c.points for c in sim]),
        np.stack([c.labels for c in sim]),
        np.stack([c.points for c in real]),
        np.stack([c.labels for c in real]),
    )


def student_loss(
    policy: StudentPolicy,
    batch,
    paired: PairedCloudSet | None,
    paired_idx: np.ndarray | None,
    beta: float,
) -> dict:
    """BC loss (GMM NLL + gripper BCE) plus the paired-feature regularizer.

    Gradients accumulate in the policy; caller steps the optimizer.
    """
    if beta > 0.0 and (paired is None or len(paired) == 0):
        raise ConfigError("paired cloud set required when beta > 0")
    points, labels, proprio, target_q, target_grip = batch
    nll, bce = policy.bc_loss(points, labels, proprio, target_q, target_grip)
    reg = 0.0
    if beta > 0.0:
        sp, sl, rp, rl = _paired_batch(paired, paired_idx)
        reg = policy.paired_regularizer(sp, sl, rp, rl, beta)
    return {"nll": nll, "bce": bce, "reg": reg, "total": nll + bce + reg}


def regularizer_value(policy: StudentPolicy, paired: PairedCloudSet, beta: float) -> float:
    """Full-set beta-weighted feature distance, no gradients."""
    sp = np.stack([c.points for c in paired.sim])
    sl = np.stack([c.labels for c in paired.sim])
    rp = np.stack([c.points for c in paired.real])
    rl = np.stack([c.labels for c in paired.real])
    phi_s = policy.encode_cloud(sp, sl)
    phi_r = policy.encode_cloud(rp, rl)
    return float(beta * np.mean(np.sum((phi_r - phi_s) ** 2, axis=-1)))


def train_student(
    rows: list[dict],
    paired: PairedCloudSet | None,
    student_cfg: StudentConfig,
    cfg: DistillConfig,
    eval_env_factory=None,
    seed: int = 0,
) -> StudentResult:
    """Adam + warmup/cosine schedule; periodic sim evaluation keeps the best
    checkpoint (falling back to the final parameters when never evaluated)."""
    if not rows:
        raise ConfigError("empty training dataset")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xD157]))
    policy = StudentPolicy.create(student_cfg, rng)
    optim = OptimState.for_params(policy.params())

    reg_first = regularizer_value(policy, paired, cfg.beta) if cfg.beta > 0 and paired else None
    best_success = -1.0
    best_modules = None
    curve: list[dict] = []
    losses: list[dict] = []
    n = len(rows)

    for step in range(cfg.steps):
        idx = rng.choice(n, size=min(cfg.batch_size, n), replace=n < cfg.batch_size)
        batch = stack_rows(rows, idx)
        if cfg.augment_data:
            points, labels, proprio, tq, tg = batch
            aug_points = np.empty_like(points)
            for i in range(points.shape[0]):
                cloud = augment(LabeledPointCloud(points[i], labels[i]), rng, cfg.aug)
                aug_points[i] = cloud.points
            proprio = proprio_noise(proprio, rng, cfg.aug)
            batch = (aug_points, labels, proprio, tq, tg)
        paired_idx = None
        if cfg.beta > 0.0 and paired is not None:
            paired_idx = rng.choice(len(paired), size=min(cfg.paired_batch, len(paired)),
                                    replace=False)
        policy.zero_grads()
        report = student_loss(policy, batch, paired, paired_idx, cfg.beta)
        adam_step(policy.params(), policy.grads(), optim, lr_at(cfg.schedule, step))
        losses.append(report)

        due = (step + 1) % cfg.eval_every == 0 or step == cfg.steps - 1
        if due and eval_env_factory is not None:
            report_eval = evaluate(
                policy, eval_env_factory(),
                seed_list=range(cfg.eval_seed_base, cfg.eval_seed_base + cfg.eval_episodes),
            )
            curve.append({"step": step + 1, "eval_success": report_eval["success_rate"]})
            if report_eval["success_rate"] > best_success:
                best_success = report_eval["success_rate"]
                best_modules = copy.deepcopy(policy.to_modules())

    if best_modules is not None:
        policy = StudentPolicy.from_modules(best_modules)
    reg_last = regularizer_value(policy, paired, cfg.beta) if cfg.beta > 0 and paired else None
    return StudentResult(policy, max(best_success, 0.0), curve, reg_first, reg_last, losses)
