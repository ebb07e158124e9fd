"""Teacher actor (Gaussian deltas + Bernoulli gripper) and critic."""

from __future__ import annotations

import numpy as np

from ..learnkit import (
    DenseNet,
    array_from_json,
    array_to_json,
    net_from_json,
    net_to_json,
    sigmoid,
)
from ..world.types import TaskSpaceAction

LOG_2PI = float(np.log(2.0 * np.pi))


class TeacherPolicy:
    """MLP encoder + ELU action head.

    Three unbounded Gaussian outputs (task-space deltas, clamped by the
    action bounds at execution time) with a learned state-independent
    log-std, plus one Bernoulli logit for the gripper.
    """

    def __init__(self, encoder: DenseNet, head: DenseNet, log_std: np.ndarray):
        self.encoder = encoder
        self.head = head
        self.log_std = np.asarray(log_std, dtype=np.float64)
        self.g_log_std = np.zeros(0)  # placeholder to keep grads aligned
        self._cache: dict | None = None

    @classmethod
    def create(cls, obs_dim: int, rng: np.random.Generator) -> "TeacherPolicy":
        encoder = DenseNet.create([obs_dim, 256, 256], "relu", rng, out_act="relu")
        head = DenseNet.create([256, 256, 128, 64, 4], "elu", rng)
        return cls(encoder, head, np.zeros(3))

    def _forward(self, obs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        out = self.head.forward(self.encoder.forward(np.atleast_2d(obs)))
        return out[:, :3], out[:, 3]

    def log_prob(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """Per-sample log pi(a|s); caches intermediates for the backward pass."""
        actions = np.atleast_2d(actions)
        mu, logit = self._forward(obs)
        std = np.exp(self.log_std)
        z = (actions[:, :3] - mu) / std
        lp_gauss = -0.5 * (z**2).sum(-1) - self.log_std.sum() - 1.5 * LOG_2PI
        g = actions[:, 3]
        lp_bern = -np.maximum(logit, 0.0) + logit * g - np.log1p(np.exp(-np.abs(logit)))
        self._cache = dict(z=z, std=std, g=g, logit=logit)
        return lp_gauss + lp_bern

    def backward_log_prob(self, dlogp: np.ndarray) -> None:
        """Accumulate d(loss)/d(params) given d(loss)/d(logp_i)."""
        c = self._cache
        if c is None:
            raise RuntimeError("backward before log_prob")
        dlogp = np.asarray(dlogp, dtype=np.float64)
        dmu = (c["z"] / c["std"]) * dlogp[:, None]
        dlogit = (c["g"] - sigmoid(c["logit"])) * dlogp
        self._dlog_std_acc += ((c["z"] ** 2 - 1.0) * dlogp[:, None]).sum(axis=0)
        dout = np.concatenate([dmu, dlogit[:, None]], axis=-1)
        self.encoder.backward(self.head.backward(dout))

    def zero_grads(self) -> None:
        self.encoder.zero_grads()
        self.head.zero_grads()
        self._dlog_std_acc = np.zeros(3)

    def params(self) -> list[np.ndarray]:
        return self.encoder.params() + self.head.params() + [self.log_std]

    def grads(self) -> list[np.ndarray]:
        return self.encoder.grads() + self.head.grads() + [self._dlog_std_acc]

    def sample(self, obs: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Batch of raw actions [dx, dy, dtheta, gripper_bit] and log-probs."""
        mu, logit = self._forward(obs)
        std = np.exp(self.log_std)
        eps = rng.standard_normal(mu.shape)
        deltas = mu + std * eps
        g = (rng.uniform(size=logit.shape) < sigmoid(logit)).astype(np.float64)
        actions = np.concatenate([deltas, g[:, None]], axis=-1)
        return actions, self.log_prob(obs, actions)

    def deterministic(self, obs: np.ndarray) -> np.ndarray:
        mu, logit = self._forward(obs)
        g = (logit > 0.0).astype(np.float64)
        return np.concatenate([mu, g[:, None]], axis=-1)

    def to_modules(self) -> dict:
        return {
            "encoder": net_to_json(self.encoder),
            "head": net_to_json(self.head),
            "log_std": array_to_json(self.log_std),
        }

    @classmethod
    def from_modules(cls, modules: dict) -> "TeacherPolicy":
        return cls(
            net_from_json(modules["encoder"]),
            net_from_json(modules["head"]),
            array_from_json(modules["log_std"]),
        )


class ValueNet:
    def __init__(self, encoder: DenseNet, head: DenseNet):
        self.encoder = encoder
        self.head = head

    @classmethod
    def create(cls, obs_dim: int, rng: np.random.Generator) -> "ValueNet":
        encoder = DenseNet.create([obs_dim, 256, 256], "relu", rng, out_act="relu")
        head = DenseNet.create([256, 128, 1], "elu", rng)
        return cls(encoder, head)

    def forward(self, obs: np.ndarray) -> np.ndarray:
        return self.head.forward(self.encoder.forward(np.atleast_2d(obs)))[:, 0]

    def backward(self, dv: np.ndarray) -> None:
        self.encoder.backward(self.head.backward(np.asarray(dv)[:, None]))

    def zero_grads(self) -> None:
        self.encoder.zero_grads()
        self.head.zero_grads()

    def params(self) -> list[np.ndarray]:
        return self.encoder.params() + self.head.params()

    def grads(self) -> list[np.ndarray]:
        return self.encoder.grads() + self.head.grads()

    def to_modules(self) -> dict:
        return {"encoder": net_to_json(self.encoder), "head": net_to_json(self.head)}

    @classmethod
    def from_modules(cls, modules: dict) -> "ValueNet":
        return cls(net_from_json(modules["encoder"]), net_from_json(modules["head"]))


def to_task_action(raw: np.ndarray, pos_bound: float, rot_bound: float) -> TaskSpaceAction:
    """Map a raw policy sample (normalized units) to an executable action.

    Samples live on the unit scale so a unit-variance Gaussian explores the
    full actuation range; execution clips to [-1, 1] and scales by the
    per-task bounds.
    """
    return TaskSpaceAction(
        float(np.clip(raw[0], -1.0, 1.0) * pos_bound),
        float(np.clip(raw[1], -1.0, 1.0) * pos_bound),
        float(np.clip(raw[2], -1.0, 1.0) * rot_bound),
        int(raw[3] > 0.5),
    )
