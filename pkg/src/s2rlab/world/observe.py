"""Proprioceptive observation vector shared by teacher and student policies."""

from __future__ import annotations

import numpy as np

from .kinematics import ee_pose
from .types import WorldState

PROPRIO_DIM = 14


def proprio_vector(state: WorldState) -> np.ndarray:
    """[q, cos q, sin q, ee x, ee y, cos/sin heading, gripper width] (14,)."""
    q = state.joints.q
    pose = ee_pose(q, state.robot.gripper_length)
    return np.concatenate(
        [
            q,
            np.cos(q),
            np.sin(q),
            [pose[0], pose[1], np.cos(pose[2]), np.sin(pose[2])],
            [state.joints.gripper_width],
        ]
    )
