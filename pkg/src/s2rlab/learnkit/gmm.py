"""Gaussian-mixture action head with exact analytic gradients."""

from __future__ import annotations

import numpy as np

from .nets import Array, DenseNet

LOG_2PI = float(np.log(2.0 * np.pi))


class GmmHead:
    """Mixture-of-diagonal-Gaussians head driven by an MLP trunk.

    The trunk maps a feature vector to ``M + 2*M*k`` outputs which are split
    into mode logits, means, and raw log-stds. Log-stds are clamped to
    ``log_std_bounds`` (clamp gradient is zero outside the open interval).
    """

    def __init__(
        self,
        trunk: DenseNet,
        num_modes: int,
        action_dim: int,
        log_std_bounds: tuple[float, float] = (-5.0, 2.0),
    ):
        if num_modes < 1:
            raise ValueError("need at least one mode")
        if trunk.n_out != num_modes + 2 * num_modes * action_dim:
            raise ValueError("trunk output dim does not match modes/action dim")
        lo, hi = log_std_bounds
        if not lo < hi:
            raise ValueError("log-std bounds must be ordered")
        self.trunk = trunk
        self.num_modes = num_modes
        self.action_dim = action_dim
        self.log_std_bounds = (float(lo), float(hi))
        self._cache: dict | None = None

    @classmethod
    def create(
        cls,
        feature_dim: int,
        action_dim: int,
        num_modes: int,
        hidden: list[int],
        act: str,
        rng: np.random.Generator,
        log_std_bounds: tuple[float, float] = (-5.0, 2.0),
    ) -> "GmmHead":
        out = num_modes + 2 * num_modes * action_dim
        trunk = DenseNet.create([feature_dim] + hidden + [out], act, rng)
        return cls(trunk, num_modes, action_dim, log_std_bounds)

    def _split(self, raw: Array) -> tuple[Array, Array, Array, Array]:
        m, k = self.num_modes, self.action_dim
        logits = raw[..., :m]
        means = raw[..., m : m + m * k].reshape(*raw.shape[:-1], m, k)
        raw_log_std = raw[..., m + m * k :].reshape(*raw.shape[:-1], m, k)
        log_std = np.clip(raw_log_std, *self.log_std_bounds)
        return logits, means, raw_log_std, log_std

    def distribution(self, features: Array) -> tuple[Array, Array, Array]:
        """Mixture weights, means, and stds for one feature vector or a batch."""
        raw = self.trunk.forward(np.asarray(features, dtype=np.float64))
        logits, means, _, log_std = self._split(raw)
        w = _softmax(logits)
        return w, means, np.exp(log_std)

    def nll(self, features: Array, actions: Array) -> Array:
        """Per-sample negative log likelihood; caches intermediates for backward."""
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        actions = np.atleast_2d(np.asarray(actions, dtype=np.float64))
        if not (np.isfinite(features).all() and np.isfinite(actions).all()):
            raise FloatingPointError("non-finite inputs to mixture NLL")
        if actions.shape[-1] != self.action_dim:
            raise ValueError("action dim mismatch")
        raw = self.trunk.forward(features)
        logits, means, raw_log_std, log_std = self._split(raw)
        std = np.exp(log_std)
        zscore = (actions[:, None, :] - means) / std
        log_comp = -0.5 * (zscore**2).sum(-1) - log_std.sum(-1) - 0.5 * self.action_dim * LOG_2PI
        log_w = logits - _logsumexp(logits)[..., None]
        log_mix = _logsumexp(log_w + log_comp)
        self._cache = dict(
            logits=logits, means=means, raw_log_std=raw_log_std, log_std=log_std,
            std=std, zscore=zscore, log_w=log_w, log_comp=log_comp, actions=actions,
        )
        return -log_mix

    def backward_nll(self, dnll: Array) -> Array:
        """Backprop ``d(loss)/d(nll_i)`` through the head; returns d(features)."""
        c = self._cache
        if c is None:
            raise RuntimeError("backward before nll")
        dnll = np.atleast_1d(np.asarray(dnll, dtype=np.float64))
        w = np.exp(c["log_w"])
        resp = _softmax(c["log_w"] + c["log_comp"])
        dlogits = (w - resp) * dnll[:, None]
        dmeans = -(resp[..., None] * c["zscore"] / c["std"]) * dnll[:, None, None]
        dlog_std = -(resp[..., None] * (c["zscore"] ** 2 - 1.0)) * dnll[:, None, None]
        lo, hi = self.log_std_bounds
        mask = (c["raw_log_std"] > lo) & (c["raw_log_std"] < hi)
        dlog_std = dlog_std * mask
        b = dlogits.shape[0]
        draw = np.concatenate(
            [dlogits, dmeans.reshape(b, -1), dlog_std.reshape(b, -1)], axis=-1
        )
        return self.trunk.backward(draw)

    def sample(self, features: Array, rng: np.random.Generator) -> Array:
        """Draw one action: categorical over modes, then diagonal Gaussian."""
        w, means, std = self.distribution(np.asarray(features, dtype=np.float64))
        if w.ndim != 1:
            raise ValueError("sample expects a single feature vector")
        mode = int(rng.choice(self.num_modes, p=w))
        return means[mode] + std[mode] * rng.standard_normal(self.action_dim)

    def mode_action(self, features: Array) -> Array:
        """Deterministic action: mean of the highest-weight mode."""
        w, means, _ = self.distribution(features)
        if w.ndim == 1:
            return means[int(np.argmax(w))]
        idx = np.argmax(w, axis=-1)
        return means[np.arange(means.shape[0]), idx]

    def params(self) -> list[Array]:
        return self.trunk.params()

    def grads(self) -> list[Array]:
        return self.trunk.grads()

    def zero_grads(self) -> None:
        self.trunk.zero_grads()


def _softmax(x: Array) -> Array:
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _logsumexp(x: Array) -> Array:
    m = x.max(axis=-1, keepdims=True)
    return (m + np.log(np.exp(x - m).sum(axis=-1, keepdims=True)))[..., 0]
