"""Running mean/variance normalizers for observations and value targets."""

from __future__ import annotations

import numpy as np


class RunningNorm:
    """Batched Welford estimator; normalization clips to +/- 10 sigma."""

    def __init__(self, dim: int, eps: float = 1e-8):
        self.mean = np.zeros(dim)
        self.var = np.ones(dim)
        self.count = eps

    def update(self, x: np.ndarray) -> None:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        b_mean = x.mean(axis=0)
        b_var = x.var(axis=0)
        b_count = x.shape[0]
        delta = b_mean - self.mean
        total = self.count + b_count
        self.mean = self.mean + delta * b_count / total
        m_a = self.var * self.count
        m_b = b_var * b_count
        self.var = (m_a + m_b + delta**2 * self.count * b_count / total) / total
        self.count = total

    def normalize(self, x: np.ndarray) -> np.ndarray:
        return np.clip((x - self.mean) / np.sqrt(self.var + 1e-8), -10.0, 10.0)

    def denormalize(self, x: np.ndarray) -> np.ndarray:
        return x * np.sqrt(self.var + 1e-8) + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "var": self.var.tolist(), "count": self.count}

    @classmethod
    def from_dict(cls, d: dict) -> "RunningNorm":
        out = cls(len(d["mean"]))
        out.mean = np.asarray(d["mean"], dtype=np.float64)
        out.var = np.asarray(d["var"], dtype=np.float64)
        out.count = float(d["count"])
        return out
