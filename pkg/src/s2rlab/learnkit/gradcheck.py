"""Central finite-difference gradient oracle for testing analytic backprop."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .nets import Array


def finite_diff_grad(
    loss_fn: Callable[[], float], params: list[Array], h: float = 1e-5
) -> list[Array]:
    """Estimate d(loss)/d(param) elementwise by central differences.

    ``loss_fn`` must be deterministic and read ``params`` in place; each
    element is perturbed by +/- h and restored afterwards.
    """
    out = []
    for p in params:
        g = np.zeros_like(p)
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + h
            f_plus = loss_fn()
            flat_p[i] = orig - h
            f_minus = loss_fn()
            flat_p[i] = orig
            flat_g[i] = (f_plus - f_minus) / (2.0 * h)
        out.append(g)
    return out


def relative_error(analytic: list[Array], numeric: list[Array]) -> float:
    """Max relative error between two gradient lists (scale-aware)."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
