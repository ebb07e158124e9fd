"""Point-cloud student policy: label embedding + per-point MLP encoder with
max pooling, proprio encoder, fusion MLP, GMM joint head, gripper logit."""

from __future__ import annotations

from dataclasses import dataclass, field

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
)
from ..world.observe import PROPRIO_DIM, proprio_vector
from ..world.types import JointTarget


@dataclass(frozen=True)
class StudentConfig:
    """Architecture knobs. Defaults are desk-scale reductions of the
    reference stack (same topology, smaller widths)."""

    cloud_budget: int = 768
    label_embed_dim: int = 8
    point_hidden: tuple = (64, 64)
    point_out: int = 64
    point_act: str = "gelu"
    proprio_hidden: tuple = (64,)
    proprio_out: int = 64
    fusion_hidden: tuple = (128,)
    fusion_out: int = 128
    gmm_modes: int = 5
    gmm_hidden: tuple = (128, 128, 128)
    gmm_act: str = "relu"
    log_std_lo: float = -5.0
    log_std_hi: float = 2.0

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        for k in ("point_hidden", "proprio_hidden", "fusion_hidden", "gmm_hidden"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StudentConfig":
        d = dict(d)
        for k in ("point_hidden", "proprio_hidden", "fusion_hidden", "gmm_hidden"):
            d[k] = tuple(d[k])
        return cls(**d)


class StudentPolicy:
    ACTION_DIM = 3

    def __init__(self, cfg: StudentConfig, label_embed, point_enc, proprio_enc, fusion,
                 gmm, grip_head):
        self.cfg = cfg
        self.label_embed = label_embed
        self.point_enc = point_enc
        self.proprio_enc = proprio_enc
        self.fusion = fusion
        self.gmm = gmm
        self.grip_head = grip_head
        self._cache: dict | None = None

    @classmethod
    def create(cls, cfg: StudentConfig, rng: np.random.Generator) -> "StudentPolicy":
        label_embed = LabelEmbedding.create(2, cfg.label_embed_dim, rng)
        point_enc = PointEncoder.create(
            2 + cfg.label_embed_dim, list(cfg.point_hidden), cfg.point_out, cfg.point_act, rng
        )
        proprio_enc = DenseNet.create(
            [PROPRIO_DIM] + list(cfg.proprio_hidden) + [cfg.proprio_out], "relu", rng,
            out_act="relu",
        )
        fusion = DenseNet.create(
            [cfg.point_out + cfg.proprio_out] + list(cfg.fusion_hidden) + [cfg.fusion_out],
            "relu", rng, out_act="relu",
        )
        gmm = GmmHead.create(
            cfg.fusion_out, cls.ACTION_DIM, cfg.gmm_modes, list(cfg.gmm_hidden),
            cfg.gmm_act, rng, (cfg.log_std_lo, cfg.log_std_hi),
        )
        grip_head = DenseNet.create([cfg.fusion_out, 64, 1], "relu", rng)
        return cls(cfg, label_embed, point_enc, proprio_enc, fusion, gmm, grip_head)

    # -- encoding -------------------------------------------------------------

    def encode_cloud(self, points: np.ndarray, labels: np.ndarray) -> np.ndarray:
        """phi: (B, N, 2) points + (B, N) labels -> (B, F) pooled features."""
        emb = self.label_embed.forward(labels)
        feats = np.concatenate([points, emb], axis=-1)
        return self.point_enc.forward(feats)

    def backward_cloud(self, dphi: np.ndarray) -> None:
        dfeats = self.point_enc.backward(dphi)
        self.label_embed.backward(dfeats[..., 2:])

    def features(self, points, labels, proprio) -> np.ndarray:
        phi = self.encode_cloud(points, labels)
        rho = self.proprio_enc.forward(np.atleast_2d(proprio))
        fused = self.fusion.forward(np.concatenate([phi, rho], axis=-1))
        self._cache = {"split": phi.shape[-1]}
        return fused

    def backward_features(self, dfused: np.ndarray) -> None:
        d = self.fusion.backward(dfused)
        split = self._cache["split"]
        self.backward_cloud(d[:, :split])
        self.proprio_enc.backward(d[:, split:])

    # -- losses ---------------------------------------------------------------

    def bc_loss(self, points, labels, proprio, target_q, target_grip) -> tuple[float, float]:
        """Mean GMM NLL + mean gripper BCE over a batch, with gradients."""
        b = points.shape[0]
        fused = self.features(points, labels, proprio)
        nll = self.gmm.nll(fused, target_q)
        logits = self.grip_head.forward(fused)[:, 0]
        bce, dlogit = bce_loss(logits, np.asarray(target_grip, dtype=np.float64))
        dfused = self.gmm.backward_nll(np.full(b, 1.0 / b))
        dfused = dfused + self.grip_head.backward((dlogit / b)[:, None])
        self.backward_features(dfused)
        return float(nll.mean()), float(bce.mean())

    def paired_regularizer(self, sim_points, sim_labels, real_points, real_labels,
                           beta: float) -> float:
        """beta * mean ||phi(real) - phi(sim)||^2 with gradients into the
        cloud encoder (two passes; the second forward restores the cache)."""
        k = sim_points.shape[0]
        phi_sim = self.encode_cloud(sim_points, sim_labels)
        phi_real = self.encode_cloud(real_points, real_labels)
        diff = phi_real - phi_sim
        value = float(beta * np.mean(np.sum(diff**2, axis=-1)))
        if beta > 0.0:
            self.backward_cloud(2.0 * beta * diff / k)  # cache holds the real pass
            self.encode_cloud(sim_points, sim_labels)
            self.backward_cloud(-2.0 * beta * diff / k)
        return value

    # -- acting ---------------------------------------------------------------

    def act_features(self, obs) -> np.ndarray:
        cloud = obs.cloud
        points = cloud.points[None]
        labels = cloud.labels[None]
        proprio = proprio_vector(obs.state)[None]
        return self.features(points, labels, proprio)

    def __call__(self, obs) -> JointTarget:
        """Deterministic action: heaviest mode's mean, thresholded gripper."""
        fused = self.act_features(obs)
        q = self.gmm.mode_action(fused)[0]
        limit = obs.state.robot
        q = np.clip(q, limit.limit_lo, limit.limit_hi)
        grip = int(self.grip_head.forward(fused)[0, 0] > 0.0)
        return JointTarget(q, grip)

    # -- plumbing ---------------------------------------------------------------

    def modules(self) -> list:
        return [self.label_embed, self.point_enc, self.proprio_enc, self.fusion,
                self.gmm, self.grip_head]

    def params(self) -> list[np.ndarray]:
        return [p for m in self.modules() for p in m.params()]

    def grads(self) -> list[np.ndarray]:
        return [g for m in self.modules() for g in m.grads()]

    def zero_grads(self) -> None:
        for m in self.modules():
            m.zero_grads()

    def to_modules(self) -> dict:
        return {
            "config": self.cfg.to_dict(),
            "label_embed": array_to_json(self.label_embed.table),
            "point_mlp": net_to_json(self.point_enc.mlp),
            "proprio_enc": net_to_json(self.proprio_enc),
            "fusion": net_to_json(self.fusion),
            "gmm_trunk": net_to_json(self.gmm.trunk),
            "grip_head": net_to_json(self.grip_head),
        }

    @classmethod
    def from_modules(cls, modules: dict) -> "StudentPolicy":
        from ..learnkit.nets import LabelEmbedding as LE, PointEncoder as PE

        cfg = StudentConfig.from_dict(modules["config"])
        label_embed = LE(array_from_json(modules["label_embed"]))
        point_enc = PE(net_from_json(modules["point_mlp"]))
        proprio_enc = net_from_json(modules["proprio_enc"])
        fusion = net_from_json(modules["fusion"])
        gmm = GmmHead(
            net_from_json(modules["gmm_trunk"]), cfg.gmm_modes, cls.ACTION_DIM,
            (cfg.log_std_lo, cfg.log_std_hi),
        )
        grip_head = net_from_json(modules["grip_head"])
        return cls(cfg, label_embed, point_enc, proprio_enc, fusion, gmm, grip_head)
