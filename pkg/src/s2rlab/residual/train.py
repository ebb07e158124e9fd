"""Two-stage residual training: action head first, then the frozen-encoder
gate classifier."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ..cloud.synth import LabeledPointCloud
from ..hitl.records import CorrectionRecord, SessionLog
from ..learnkit import LrSchedule, OptimState, adam_step, lr_at
from .algebra import residual_target
from .policy import ResidualConfig, ResidualPolicy


@dataclass(frozen=True)
class ResidualTrainConfig:
    stage1_steps: int = 1500
    stage2_steps: int = 600
    batch_size: int = 16
    schedule: LrSchedule = field(default_factory=lambda: LrSchedule(base_lr=1e-4))

    def to_dict(self) -> dict:
        return {
            "stage1_steps": self.stage1_steps,
            "stage2_steps": self.stage2_steps,
            "batch_size": self.batch_size,
            "schedule": self.schedule.__dict__.copy(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualTrainConfig":
        d = dict(d)
        d["schedule"] = LrSchedule(**d["schedule"])
        return cls(**d)


@dataclass
class ResidualResult:
    policy: ResidualPolicy
    stage1_losses: list[dict]
    stage2_losses: list[float]
    gate_train_accuracy: float
    gate_val_accuracy: float | None


def _record_batch(records: list[CorrectionRecord], idx) -> tuple:
    clouds = [LabeledPointCloud.from_flat(records[i].cloud) for i in idx]
    points = np.stack([c.points for c in clouds])
    labels = np.stack([c.labels for c in clouds])
    proprio = np.stack([np.asarray(records[i].proprio) for i in idx])
    base_q = np.stack([records[i].base_action.q for i in idx])
    base_grip = np.array([records[i].base_action.gripper for i in idx])
    targets = [residual_target(records[i].q_pre, records[i].q_post) for i in idx]
    dq = np.stack([t.dq for t in targets])
    keep = np.array([t.gripper_keep for t in targets], dtype=np.float64)
    return points, labels, proprio, base_q, base_grip, dq, keep


def _gate_samples(records: list[CorrectionRecord], log: SessionLog):
    """Positives: intervention-step records. Negatives: autonomous steps."""
    pos = [
        (r.cloud, r.proprio, r.base_action.q, r.base_action.gripper) for r in records
    ]
    neg = [
        (s.cloud, s.proprio, np.asarray(s.base_action[:-1]), int(s.base_action[-1]))
        for s in log.robot_steps()
        if not s.intervened
    ]
    return pos, neg


def _stack_gate(samples, idx):
    clouds = [LabeledPointCloud.from_flat(samples[i][0]) for i in idx]
    points = np.stack([c.points for c in clouds])
    labels = np.stack([c.labels for c in clouds])
    proprio = np.stack([np.asarray(samples[i][1]) for i in idx])
    base_q = np.stack([np.asarray(samples[i][2]) for i in idx])
    base_grip = np.array([samples[i][3] for i in idx])
    return points, labels, proprio, base_q, base_grip


def _gate_accuracy(policy, pos, neg, rng, n=200) -> float:
    correct = 0
    total = 0
    for samples, label in ((pos, 1.0), (neg, 0.0)):
        if not samples:
            continue
        take = min(n, len(samples))
        idx = rng.choice(len(samples), size=take, replace=False)
        points, labels, proprio, base_q, base_grip = _stack_gate(samples, idx)
        fused = policy.features(points, labels, proprio, base_q, base_grip)
        logits = policy.gate_head.forward(fused)[:, 0]
        correct += int(np.sum((logits > 0) == bool(label)))
        total += take
    return correct / max(total, 1)


def train_residual(
    records: list[CorrectionRecord],
    session_log: SessionLog | None,
    residual_cfg: ResidualConfig,
    cfg: ResidualTrainConfig,
    seed: int = 0,
    val_records: list[CorrectionRecord] | None = None,
    val_log: SessionLog | None = None,
) -> ResidualResult:
    """Stage 1 trains encoder + action/keep heads on correction records only;
    stage 2 freezes everything and fits the gate by classification with 1:1
    positive/negative resampling."""
    if not records:
        raise ValueError("empty correction dataset")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x6E5]))
    policy = ResidualPolicy.create(residual_cfg, rng)

    optim1 = OptimState.for_params(policy.stage1_params())
    stage1_losses = []
    n = len(records)
    for step in range(cfg.stage1_steps):
        idx = rng.choice(n, size=min(cfg.batch_size, n), replace=n < cfg.batch_size)
        batch = _record_batch(records, idx)
        policy.zero_grads()
        nll, bce = policy.action_loss(*batch)
        adam_step(policy.stage1_params(), policy.stage1_grads(), optim1,
                  lr_at(cfg.schedule, step))
        stage1_losses.append({"nll": nll, "bce": bce, "total": nll + bce})

    stage2_losses: list[float] = []
    gate_train_acc = 0.0
    gate_val_acc = None
    if cfg.stage2_steps > 0:
        if session_log is None or not session_log.steps:
            raise ValueError("stage 2 requires session logs for gate negatives")
        pos, neg = _gate_samples(records, session_log)
        if not neg:
            raise ValueError("no autonomous steps available as gate negatives")
        frozen = copy.deepcopy(policy.stage1_params())
        optim2 = OptimState.for_params(policy.gate_head.params())
        half = max(1, cfg.batch_size // 2)
        for step in range(cfg.stage2_steps):
            pi = rng.choice(len(pos), size=half, replace=len(pos) < half)
            ni = rng.choice(len(neg), size=half, replace=len(neg) < half)
            p_batch = _stack_gate(pos, pi)
            n_batch = _stack_gate(neg, ni)
            points = np.concatenate([p_batch[0], n_batch[0]])
            labels = np.concatenate([p_batch[1], n_batch[1]])
            proprio = np.concatenate([p_batch[2], n_batch[2]])
            base_q = np.concatenate([p_batch[3], n_batch[3]])
            base_grip = np.concatenate([p_batch[4], n_batch[4]])
            gate_label = np.concatenate([np.ones(half), np.zeros(half)])
            policy.zero_grads()
            loss = policy.gate_loss(points, labels, proprio, base_q, base_grip, gate_label)
            adam_step(policy.gate_head.params(), policy.gate_head.grads(), optim2,
                      lr_at(cfg.schedule, step))
            stage2_losses.append(loss)
        for before, after in zip(frozen, policy.stage1_params()):
            if not np.array_equal(before, after):
                raise AssertionError("stage 2 modified frozen stage-1 parameters")
        gate_train_acc = _gate_accuracy(policy, pos, neg, rng)
        if val_records is not None and val_log is not None and val_log.steps:
            vpos, vneg = _gate_samples(val_records, val_log)
            if vpos and vneg:
                gate_val_acc = _gate_accuracy(policy, vpos, vneg, rng)
    return ResidualResult(policy, stage1_losses, stage2_losses, gate_train_acc, gate_val_acc)
