"""Differential IK (damped least squares) and the joint-position controller."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..world.kinematics import NEUTRAL_Q, jacobian
from ..world.types import JointTarget, TaskSpaceAction

DAMPING = 0.02
NULLSPACE_GAIN = 0.3
SINGULARITY_THRESHOLD = 0.02


@dataclass
class IkResult:
    target: JointTarget
    near_singular: bool
    clamped: bool


def ik_step(
    q: np.ndarray,
    delta: TaskSpaceAction,
    gripper_length: float = 0.10,
    limit_lo: np.ndarray | None = None,
    limit_hi: np.ndarray | None = None,
    damping: float = DAMPING,
    max_dq: float | None = None,
) -> IkResult:
    """One damped-least-squares step toward an end-effector delta.

    Near singularities the damping term dominates and the commanded motion
    shrinks; this is flagged rather than raised. A nullspace bias pulls the
    arm toward the neutral posture without disturbing the task motion.
    With ``max_dq`` set, the joint delta is rescaled (direction preserved)
    so a per-joint step clamp of that size cannot distort the twist.
    """
    q = np.asarray(q, dtype=np.float64)
    jac = jacobian(q, gripper_length)
    twist = np.array([delta.dx, delta.dy, delta.dtheta])
    jjt = jac @ jac.T + damping**2 * np.eye(3)
    dq = jac.T @ np.linalg.solve(jjt, twist)
    # exact nullspace projector: for this square Jacobian it is nonzero only
    # near singularities, where it pushes the posture back toward neutral
    _, sv, vt = np.linalg.svd(jac)
    null_rows = vt[sv < SINGULARITY_THRESHOLD]
    if null_rows.size:
        null_proj = null_rows.T @ null_rows
        dq = dq + null_proj @ (NULLSPACE_GAIN * (NEUTRAL_Q - q))
    near_singular = bool(sv.min() < SINGULARITY_THRESHOLD)
    if max_dq is not None:
        worst = float(np.max(np.abs(dq)))
        if worst > max_dq:
            dq = dq * (max_dq / worst)
    target = q + dq
    clamped = False
    if limit_lo is not None and limit_hi is not None:
        bounded = np.clip(target, limit_lo, limit_hi)
        clamped = bool(np.any(bounded != target))
        target = bounded
    return IkResult(JointTarget(target, int(delta.gripper)), near_singular, clamped)


def joint_controller(q: np.ndarray, target: JointTarget, max_step: float = 0.1) -> np.ndarray:
    """Advance q one tick toward the target, per-joint step clamped."""
    q = np.asarray(q, dtype=np.float64)
    return q + np.clip(np.asarray(target.q) - q, -max_step, max_step)


def task_space_target(state, action: TaskSpaceAction) -> IkResult:
    """Convert a task-space delta into a joint target for a world state.

    One shared adapter so the RL teacher, oracle corrections, and live
    teleoperation all route through identical controller math.
    """
    robot = state.robot
    return ik_step(
        state.joints.q,
        action,
        gripper_length=robot.gripper_length,
        limit_lo=robot.limit_lo,
        limit_hi=robot.limit_hi,
        max_dq=robot.max_joint_step,
    )
