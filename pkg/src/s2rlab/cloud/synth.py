"""Labeled scene-cloud synthesis from world state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..world.kinematics import ee_pose, joint_positions
from ..world.types import BodyPose, WorldState
from .templates import (
    FINGER_TEMPLATE_POINTS,
    OBJECT_TEMPLATE_POINTS,
    finger_template,
    shape_template,
    transform_template,
)

LABEL_SCENE = 0
LABEL_GRIPPER = 1


@dataclass
class LabeledPointCloud:
    """N planar points with a binary semantic label (scene=0, gripper=1)."""

    points: np.ndarray  # (N, 2)
    labels: np.ndarray  # (N,) int8

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        self.labels = np.asarray(self.labels, dtype=np.int8).reshape(-1)
        if self.points.shape[0] != self.labels.shape[0]:
            raise ValueError("points/labels length mismatch")

    def __len__(self) -> int:
        return self.points.shape[0]

    def clone(self) -> "LabeledPointCloud":
        return LabeledPointCloud(self.points.copy(), self.labels.copy())

    def features(self) -> np.ndarray:
        """(N, 3) array: coordinates with the label as a third channel."""
        return np.concatenate([self.points, self.labels[:, None].astype(np.float64)], axis=1)

    def to_flat(self) -> list[float]:
        return self.features().reshape(-1).tolist()

    @classmethod
    def from_flat(cls, flat) -> "LabeledPointCloud":
        arr = np.asarray(flat, dtype=np.float64).reshape(-1, 3)
        return cls(arr[:, :2], arr[:, 2].astype(np.int8))


def downsample(cloud: LabeledPointCloud, n: int, rng: np.random.Generator) -> LabeledPointCloud:
    """Uniform sample without replacement; labels travel with their points."""
    total = len(cloud)
    if n > total:
        raise ValueError(f"cannot downsample {total} points to {n} without replacement")
    idx = rng.choice(total, size=n, replace=False)
    return LabeledPointCloud(cloud.points[idx], cloud.labels[idx])


def gripper_cloud(state: WorldState) -> LabeledPointCloud:
    """Finger points placed by forward kinematics, label=1."""
    q = state.joints.q
    robot = state.robot
    pts = joint_positions(q)
    wrist = pts[-1]
    theta = float(np.sum(q))
    normal = np.array([-np.sin(theta), np.cos(theta)])
    half = 0.5 * max(state.joints.gripper_width, 0.012)
    tmpl = finger_template(robot.gripper_length)
    fingers = []
    for side in (+1.0, -1.0):
        root = wrist + side * half * normal
        fingers.append(transform_template(tmpl, BodyPose(root[0], root[1], theta)))
    points = np.concatenate(fingers)
    return LabeledPointCloud(points, np.full(len(points), LABEL_GRIPPER, dtype=np.int8))


def scene_cloud(state: WorldState) -> LabeledPointCloud:
    """Union of transformed object templates (label 0) plus gripper fingers."""
    parts = [transform_template(shape_template(o.shape), o.pose) for o in state.objects]
    grip = gripper_cloud(state)
    points = np.concatenate(parts + [grip.points]) if parts else grip.points
    labels = np.concatenate(
        [np.zeros(sum(len(p) for p in parts), dtype=np.int8), grip.labels]
    )
    return LabeledPointCloud(points, labels)


def synthesize_scene(state: WorldState, budget: int = 768) -> LabeledPointCloud:
    """Full scene cloud downsampled to the budget.

    Pure in the world state: the downsampling RNG is derived from the
    episode seed and step counter, so rebuilding the same snapshot yields
    the same cloud.
    """
    full = scene_cloud(state)
    if len(full) < budget:
        raise ValueError(
            f"scene produced {len(full)} points < budget {budget}; raise template density"
        )
    rng = np.random.default_rng(
        np.random.SeedSequence([state.episode_seed & 0x7FFFFFFF, state.step, 0xC1D])
    )
    return downsample(full, budget, rng)


def expected_raw_points(n_objects: int) -> int:
    return n_objects * OBJECT_TEMPLATE_POINTS + 2 * FINGER_TEMPLATE_POINTS
