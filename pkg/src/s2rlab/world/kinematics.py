"""Analytic forward kinematics, Jacobian, and damped-least-squares IK for
the planar 3-link arm. The end-effector frame is the grip center: wrist
position extended along the final heading by the gripper length."""

from __future__ import annotations

import numpy as np

LINK_LENGTHS = np.array([0.30, 0.25, 0.15])
NEUTRAL_Q = np.array([0.4, -0.5, -0.3])


def rot(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def joint_positions(q: np.ndarray, link_lengths: np.ndarray = LINK_LENGTHS) -> np.ndarray:
    """Positions of the base and each joint/wrist, shape (n_links+1, 2)."""
    cum = np.cumsum(q[: len(link_lengths)])
    xs = np.concatenate(([0.0], np.cumsum(link_lengths * np.cos(cum))))
    ys = np.concatenate(([0.0], np.cumsum(link_lengths * np.sin(cum))))
    return np.stack([xs, ys], axis=1)


def ee_pose(
    q: np.ndarray,
    gripper_length: float,
    link_lengths: np.ndarray = LINK_LENGTHS,
) -> np.ndarray:
    """(x, y, theta) of the grip center."""
    cum = np.cumsum(q[: len(link_lengths)])
    theta = cum[-1]
    cos, sin = np.cos(cum), np.sin(cum)
    x = float(link_lengths @ cos + gripper_length * cos[-1])
    y = float(link_lengths @ sin + gripper_length * sin[-1])
    return np.array([x, y, theta])


def finger_positions(
    q: np.ndarray,
    gripper_length: float,
    gripper_width: float,
    link_lengths: np.ndarray = LINK_LENGTHS,
) -> np.ndarray:
    """Left/right finger tip positions, shape (2, 2)."""
    pose = ee_pose(q, gripper_length, link_lengths)
    theta = pose[2]
    normal = np.array([-np.sin(theta), np.cos(theta)])
    half = 0.5 * gripper_width
    return np.stack([pose[:2] + half * normal, pose[:2] - half * normal])


def jacobian(
    q: np.ndarray,
    gripper_length: float,
    link_lengths: np.ndarray = LINK_LENGTHS,
) -> np.ndarray:
    """3x3 Jacobian of the grip-center pose (x, y, theta) w.r.t. q.

    Column j is the lever arm of every segment at or beyond joint j (the
    gripper offset folds into the last link), rotated 90 degrees.
    """
    n = len(link_lengths)
    cum = np.cumsum(q[:n])
    vx = link_lengths * np.cos(cum)
    vy = link_lengths * np.sin(cum)
    vx[-1] += gripper_length * np.cos(cum[-1])
    vy[-1] += gripper_length * np.sin(cum[-1])
    sx = np.cumsum(vx[::-1])[::-1]
    sy = np.cumsum(vy[::-1])[::-1]
    return np.stack([-sy, sx, np.ones(n)])


def heading_feasible(
    point: np.ndarray,
    heading: float,
    gripper_length: float = 0.10,
    link_lengths: np.ndarray = LINK_LENGTHS,
    margin: float = 0.03,
) -> bool:
    """Whether the grip center can sit at ``point`` with this heading.

    The end of link 2 is pinned at point - (L3 + grip) * u(heading); it must
    lie inside the two-link annulus reachable by links 1 and 2.
    """
    back = link_lengths[2] + gripper_length
    p2 = np.asarray(point[:2]) - back * np.array([np.cos(heading), np.sin(heading)])
    r = float(np.linalg.norm(p2))
    lo = abs(link_lengths[0] - link_lengths[1]) + margin
    hi = link_lengths[0] + link_lengths[1] - margin
    return lo <= r <= hi


def solve_ik(
    target: np.ndarray,
    q0: np.ndarray = NEUTRAL_Q,
    gripper_length: float = 0.10,
    link_lengths: np.ndarray = LINK_LENGTHS,
    iters: int = 200,
    damping: float = 0.05,
) -> np.ndarray:
    """Iterative damped-least-squares IK toward a full (x, y, theta) pose.

    Deterministic; returns the best q found (the residual is not checked
    here, callers asserting reachability should verify it).
    """
    q = np.asarray(q0, dtype=np.float64).copy()
    for _ in range(iters):
        pose = ee_pose(q, gripper_length, link_lengths)
        err = np.array(
            [target[0] - pose[0], target[1] - pose[1],
             np.arctan2(np.sin(target[2] - pose[2]), np.cos(target[2] - pose[2]))]
        )
        if np.linalg.norm(err) < 1e-12:
            break
        jac = jacobian(q, gripper_length, link_lengths)
        delta = jac.T @ np.linalg.solve(jac @ jac.T + damping**2 * np.eye(3), err)
        q += np.clip(delta, -0.2, 0.2)
    return q
