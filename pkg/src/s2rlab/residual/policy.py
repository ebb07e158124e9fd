"""Residual policy conditioned on the base policy's output, with a gate
head sharing the fused feature encoder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..learnkit import (
    DenseNet,
    GmmHead,
    LabelEmbedding,
    PointEncoder,
    array_from_json,
    array_to_json,
    bce_loss,
    net_from_json,
    net_to_json,
    sigmoid,
)
from ..world.observe import PROPRIO_DIM, proprio_vector
from ..world.types import JointTarget
from .algebra import ResidualAction


@dataclass(frozen=True)
class ResidualConfig:
    cloud_budget: int = 768
    label_embed_dim: int = 8
    point_hidden: tuple = (64, 64)
    point_out: int = 64
    point_act: str = "gelu"
    proprio_hidden: tuple = (64,)
    proprio_out: int = 64
    base_grip_embed_dim: int = 8
    fusion_hidden: tuple = (128,)
    fusion_out: int = 128
    gmm_modes: int = 5
    gmm_hidden: tuple = (128, 128, 128)
    gmm_act: str = "relu"
    log_std_lo: float = -5.0
    log_std_hi: float = 2.0
    gate_threshold: float = 0.5

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        for k in ("point_hidden", "proprio_hidden", "fusion_hidden", "gmm_hidden"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualConfig":
        d = dict(d)
        for k in ("point_hidden", "proprio_hidden", "fusion_hidden", "gmm_hidden"):
            d[k] = tuple(d[k])
        return cls(**d)


class ResidualPolicy:
    ACTION_DIM = 3

    def __init__(self, cfg, label_embed, point_enc, proprio_enc, grip_embed, fusion,
                 gmm, keep_head, gate_head):
        self.cfg = cfg
        self.label_embed = label_embed
        self.point_enc = point_enc
        self.proprio_enc = proprio_enc
        self.grip_embed = grip_embed
        self.fusion = fusion
        self.gmm = gmm
        self.keep_head = keep_head
        self.gate_head = gate_head
        self._split: tuple | None = None

    @classmethod
    def create(cls, cfg: ResidualConfig, rng: np.random.Generator) -> "ResidualPolicy":
        label_embed = LabelEmbedding.create(2, cfg.label_embed_dim, rng)
        point_enc = PointEncoder.create(
            2 + cfg.label_embed_dim, list(cfg.point_hidden), cfg.point_out, cfg.point_act, rng
        )
        proprio_enc = DenseNet.create(
            [PROPRIO_DIM] + list(cfg.proprio_hidden) + [cfg.proprio_out], "relu", rng,
            out_act="relu",
        )
        grip_embed = LabelEmbedding.create(2, cfg.base_grip_embed_dim, rng)
        fuse_in = cfg.point_out + cfg.proprio_out + cls.ACTION_DIM + cfg.base_grip_embed_dim
        fusion = DenseNet.create(
            [fuse_in] + list(cfg.fusion_hidden) + [cfg.fusion_out], "relu", rng, out_act="relu"
        )
        gmm = GmmHead.create(
            cfg.fusion_out, cls.ACTION_DIM, cfg.gmm_modes, list(cfg.gmm_hidden),
            cfg.gmm_act, rng, (cfg.log_std_lo, cfg.log_std_hi),
        )
        keep_head = DenseNet.create([cfg.fusion_out, 64, 1], "relu", rng)
        gate_head = DenseNet.create([cfg.fusion_out, 128, 128, 128, 1], "relu", rng)
        return cls(cfg, label_embed, point_enc, proprio_enc, grip_embed, fusion,
                   gmm, keep_head, gate_head)

    # -- encoding --------------------------------------------------------------

    def features(self, points, labels, proprio, base_q, base_grip) -> np.ndarray:
        phi = self.point_enc.forward(
            np.concatenate([points, self.label_embed.forward(labels)], axis=-1)
        )
        rho = self.proprio_enc.forward(np.atleast_2d(proprio))
        gemb = self.grip_embed.forward(np.asarray(base_grip, dtype=np.int64))
        base_q = np.atleast_2d(base_q)
        fused_in = np.concatenate([phi, rho, base_q, gemb], axis=-1)
        self._split = (phi.shape[-1], rho.shape[-1], base_q.shape[-1])
        return self.fusion.forward(fused_in)

    def backward_features(self, dfused: np.ndarray) -> None:
        d = self.fusion.backward(dfused)
        p, r, a = self._split
        dphi = d[:, :p]
        drho = d[:, p : p + r]
        dgemb = d[:, p + r + a :]
        dfeats = self.point_enc.backward(dphi)
        self.label_embed.backward(dfeats[..., 2:])
        self.proprio_enc.backward(drho)
        self.grip_embed.backward(dgemb)

    # -- stage-1 loss ------------------------------------------------------------

    def action_loss(self, points, labels, proprio, base_q, base_grip,
                    target_dq, target_keep) -> tuple[float, float]:
        """Mean correction NLL + keep-bit BCE, gradients accumulated."""
        b = points.shape[0]
        fused = self.features(points, labels, proprio, base_q, base_grip)
        nll = self.gmm.nll(fused, target_dq)
        logits = self.keep_head.forward(fused)[:, 0]
        bce, dlogit = bce_loss(logits, np.asarray(target_keep, dtype=np.float64))
        dfused = self.gmm.backward_nll(np.full(b, 1.0 / b))
        dfused = dfused + self.keep_head.backward((dlogit / b)[:, None])
        self.backward_features(dfused)
        return float(nll.mean()), float(bce.mean())

    # -- stage-2 gate loss ---------------------------------------------------------

    def gate_loss(self, points, labels, proprio, base_q, base_grip, gate_label) -> float:
        """Classification on the frozen fused features: only the gate head
        receives gradients."""
        b = points.shape[0]
        fused = self.features(points, labels, proprio, base_q, base_grip)
        logits = self.gate_head.forward(fused)[:, 0]
        bce, dlogit = bce_loss(logits, np.asarray(gate_label, dtype=np.float64))
        self.gate_head.backward((dlogit / b)[:, None])
        return float(bce.mean())

    # -- inference ---------------------------------------------------------------

    def _obs_features(self, obs, base: JointTarget) -> np.ndarray:
        cloud = obs.cloud
        return self.features(
            cloud.points[None], cloud.labels[None],
            proprio_vector(obs.state)[None],
            np.asarray(base.q)[None], np.asarray([base.gripper]),
        )

    def act_and_gate(self, obs, base: JointTarget) -> tuple[ResidualAction, float]:
        """Deterministic residual (heaviest mode mean, thresholded keep bit)
        plus the gate probability, from one shared feature pass."""
        fused = self._obs_features(obs, base)
        dq = self.gmm.mode_action(fused)[0]
        keep = int(sigmoid(self.keep_head.forward(fused)[:, 0])[0] > 0.5)
        gate_p = float(sigmoid(self.gate_head.forward(fused)[:, 0])[0])
        return ResidualAction(dq, keep), gate_p

    def gate_probability(self, obs, base: JointTarget) -> float:
        fused = self._obs_features(obs, base)
        return float(sigmoid(self.gate_head.forward(fused)[:, 0])[0])

    # -- plumbing ----------------------------------------------------------------

    def stage1_modules(self) -> list:
        return [self.label_embed, self.point_enc, self.proprio_enc, self.grip_embed,
                self.fusion, self.gmm, self.keep_head]

    def stage1_params(self) -> list[np.ndarray]:
        return [p for m in self.stage1_modules() for p in m.params()]

    def params(self) -> list[np.ndarray]:
        return self.stage1_params() + self.gate_head.params()

    def zero_grads(self) -> None:
        for m in self.stage1_modules():
            m.zero_grads()
        self.gate_head.zero_grads()

    def stage1_grads(self) -> list[np.ndarray]:
        return [g for m in self.stage1_modules() for g in m.grads()]

    def to_modules(self) -> dict:
        return {
            "config": self.cfg.to_dict(),
            "label_embed": array_to_json(self.label_embed.table),
            "point_mlp": net_to_json(self.point_enc.mlp),
            "proprio_enc": net_to_json(self.proprio_enc),
            "grip_embed": array_to_json(self.grip_embed.table),
            "fusion": net_to_json(self.fusion),
            "gmm_trunk": net_to_json(self.gmm.trunk),
            "keep_head": net_to_json(self.keep_head),
            "gate_head": net_to_json(self.gate_head),
        }

    @classmethod
    def from_modules(cls, modules: dict) -> "ResidualPolicy":
        cfg = ResidualConfig.from_dict(modules["config"])
        return cls(
            cfg,
            LabelEmbedding(array_from_json(modules["label_embed"])),
            PointEncoder(net_from_json(modules["point_mlp"])),
            net_from_json(modules["proprio_enc"]),
            LabelEmbedding(array_from_json(modules["grip_embed"])),
            net_from_json(modules["fusion"]),
            GmmHead(net_from_json(modules["gmm_trunk"]), cfg.gmm_modes, cls.ACTION_DIM,
                    (cfg.log_std_lo, cfg.log_std_hi)),
            net_from_json(modules["keep_head"]),
            net_from_json(modules["gate_head"]),
        )
