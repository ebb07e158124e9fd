"""Privileged observation vector for RL teachers.

Layout (fixed per task): proprio block (14) followed by per-object pose and
velocity, end-effector velocity, per-object contact flags, finger tip
positions, and joint velocities.
"""

from __future__ import annotations

import numpy as np

from ..world.kinematics import finger_positions
from ..world.observe import PROPRIO_DIM, proprio_vector
from ..world.types import WorldState

_OBJECT_COUNT = {"stabilize": 5, "reach_grasp": 1, "insert": 2, "screw": 2}


def object_count(task: str) -> int:
    return _OBJECT_COUNT[task]


def privileged_dim(task: str) -> int:
    n = object_count(task)
    return PROPRIO_DIM + 7 * n + 3 + n + 4 + 3


def privileged_vector(state: WorldState) -> np.ndarray:
    parts = [proprio_vector(state)]
    for obj in state.objects:
        pose = obj.pose
        parts.append([pose.x, pose.y, np.cos(pose.theta), np.sin(pose.theta)])
    parts.append(state.object_vel.reshape(-1))
    parts.append(state.ee_vel)
    parts.append(state.contacts.astype(np.float64))
    fingers = finger_positions(
        state.joints.q, state.robot.gripper_length, state.joints.gripper_width
    )
    parts.append(fingers.reshape(-1))
    parts.append(state.qd)
    return np.concatenate([np.asarray(p, dtype=np.float64).reshape(-1) for p in parts])
