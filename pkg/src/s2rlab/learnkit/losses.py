"""Scalar classification losses."""

from __future__ import annotations

import numpy as np

from .nets import Array


def sigmoid(z: Array) -> Array:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def bce_loss(logits: Array, labels: Array) -> tuple[Array, Array]:
    """Numerically stable binary cross-entropy with logits.

    Returns per-element loss and the gradient d(loss)/d(logit), which is
    ``sigmoid(logit) - label``.
    """
    z = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    loss = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    grad = sigmoid(z) - y
    return loss, grad
