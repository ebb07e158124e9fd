"""Residual action algebra: generalized subtraction and its inverse.

Continuous joint components subtract numerically; the binary gripper
component composes by XNOR (keep=1 preserves the base bit, keep=0 negates).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..world.types import JointState, JointTarget


@dataclass
class ResidualAction:
    dq: np.ndarray
    gripper_keep: int  # 1 = keep base gripper bit, 0 = negate it

    def __post_init__(self):
        self.dq = np.asarray(self.dq, dtype=np.float64)
        if not np.isfinite(self.dq).all():
            raise ValueError("non-finite joint delta")
        if self.gripper_keep not in (0, 1):
            raise ValueError("gripper_keep must be binary")

    def to_list(self) -> list:
        return [*self.dq.tolist(), self.gripper_keep]

    @classmethod
    def from_list(cls, v) -> "ResidualAction":
        return cls(np.asarray(v[:-1], dtype=np.float64), int(v[-1]))


def xnor(a: int, b: int) -> int:
    return 1 if int(a) == int(b) else 0


def residual_target(q_pre: JointState, q_post: JointState) -> ResidualAction:
    """a_R = post (-) pre: joint difference, XNOR of the gripper bits."""
    if q_pre.q.shape != q_post.q.shape:
        raise ValueError("joint dimension mismatch")
    return ResidualAction(q_post.q - q_pre.q, xnor(q_post.gripper, q_pre.gripper))


def apply_residual(
    base: JointTarget,
    res: ResidualAction,
    limit_lo: np.ndarray | None = None,
    limit_hi: np.ndarray | None = None,
) -> JointTarget:
    """base (+) residual: add joint deltas (clamped), XNOR the gripper."""
    if base.q.shape != res.dq.shape:
        raise ValueError("joint dimension mismatch")
    q = base.q + res.dq
    if limit_lo is not None and limit_hi is not None:
        q = np.clip(q, limit_lo, limit_hi)
    return JointTarget(q, xnor(base.gripper, res.gripper_keep))
