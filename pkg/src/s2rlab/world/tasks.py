"""Task definitions, reward functions, and success/failure predicates.

Reward weights and initial-condition ranges follow the published task
recipes; wall geometry, the stabilize success region, and grasp/lift
thresholds are desk-scale choices exposed as configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from . import shapes
from .kinematics import ee_pose
from .types import TASKS, BodyPose, WorldState, wrap_angle

DEG = np.pi / 180.0


@dataclass(frozen=True)
class WorldConfig:
    """Geometry and contact constants shared by all tasks."""

    gripper_length: float = 0.10
    gripper_max_width: float = 0.08
    ee_contact_radius: float = 0.03
    grasp_tolerance: float = 0.035
    max_joint_step: float = 0.1
    joint_limit: float = 2.9
    front_wall_x: float = 0.72
    right_wall_y: float = -0.28
    wall_contact_tol: float = 0.012
    # stabilize success region (x0, x1, y0, y1)
    region: tuple[float, float, float, float] = (0.54, 0.72, -0.28, -0.10)
    lift_threshold: float = 0.05
    partial_lift_threshold: float = 0.02
    insert_pos_threshold: float = 0.015
    insert_angle_threshold: float = 0.15
    screw_peg_height: float = 0.10
    screw_fail_deviation: float = 10.0 * DEG
    screw_success_angle: float = np.pi

    def to_dict(self) -> dict:
        d = asdict(self)
        d["region"] = list(self.region)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WorldConfig":
        d = dict(d)
        if "region" in d:
            d["region"] = tuple(d["region"])
        return cls(**d)


@dataclass(frozen=True)
class TaskSpec:
    """Per-task episode length, reward weights, and init randomization."""

    task: str
    episode_length: int
    weights: dict[str, float] = field(default_factory=dict)
    # initial object pose noise
    translate_range: float = 0.0
    rotate_range: float = 0.0
    joint_noise: float = 0.0

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "episode_length": self.episode_length,
            "weights": dict(self.weights),
            "translate_range": self.translate_range,
            "rotate_range": self.rotate_range,
            "joint_noise": self.joint_noise,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskSpec":
        return cls(
            task=d["task"],
            episode_length=d["episode_length"],
            weights=dict(d["weights"]),
            translate_range=d["translate_range"],
            rotate_range=d["rotate_range"],
            joint_noise=d["joint_noise"],
        )


_DEFAULT_SPECS = {
    "stabilize": TaskSpec(
        "stabilize", episode_length=100,
        weights={"success": 10.0, "qd": 1e-5, "action": 1e-5},
        translate_range=0.015, rotate_range=15.0 * DEG,
    ),
    "reach_grasp": TaskSpec(
        "reach_grasp", episode_length=50,
        weights={"distance": 0.1, "lifted": 1.0, "success": 200.0},
        translate_range=0.0, rotate_range=np.pi,
    ),
    "insert": TaskSpec(
        "insert", episode_length=100,
        weights={"distance": 1.0, "success": 100.0},
        translate_range=0.02, rotate_range=45.0 * DEG, joint_noise=0.25,
    ),
    "screw": TaskSpec(
        "screw", episode_length=200,
        weights={"screw": 0.1, "success": 100.0, "deviation": 1e-2},
        translate_range=0.005, rotate_range=0.0, joint_noise=0.05,
    ),
}


def default_task_spec(task: str) -> TaskSpec:
    if task not in _DEFAULT_SPECS:
        raise ValueError(f"unknown task {task!r}")
    return _DEFAULT_SPECS[task]


# --- geometry helpers ------------------------------------------------------

def grip_center(state: WorldState) -> np.ndarray:
    return ee_pose(state.joints.q, state.robot.gripper_length)[:2]


def ee_theta(state: WorldState) -> float:
    return float(np.sum(state.joints.q))


def socket_pose(state: WorldState) -> BodyPose:
    """Insert target: assembly hole fixed in the tabletop frame."""
    table = state.objects[0].pose
    off = np.array([0.05, -0.05])
    c, s = np.cos(table.theta), np.sin(table.theta)
    return BodyPose(
        table.x + c * off[0] - s * off[1],
        table.y + s * off[0] + c * off[1],
        table.theta,
    )


def _in_region(p: np.ndarray, region: tuple[float, float, float, float]) -> bool:
    x0, x1, y0, y1 = region
    return x0 <= p[0] <= x1 and y0 <= p[1] <= y1


# --- success / failure -----------------------------------------------------

def success_stabilize(state: WorldState, cfg: WorldConfig) -> bool:
    table = state.objects[0]
    front, right = shapes.wall_contact(
        table.shape, table.pose, cfg.front_wall_x, cfg.right_wall_y, cfg.wall_contact_tol
    )
    if not (front and right):
        return False
    if not _in_region(table.pose.position, cfg.region):
        return False
    for leg in state.objects[1:]:
        if _in_region(leg.pose.position, cfg.region):
            return False
    return True


def lifted(state: WorldState, cfg: WorldConfig, threshold: float) -> bool:
    if state.attached < 0:
        return False
    moved = np.linalg.norm(
        state.objects[state.attached].pose.position - state.object_init_pos[state.attached]
    )
    return bool(moved >= threshold)


def success_reach_grasp(state: WorldState, cfg: WorldConfig) -> bool:
    return lifted(state, cfg, cfg.lift_threshold)


def insert_distances(state: WorldState, cfg: WorldConfig) -> tuple[float, float]:
    leg = state.objects[1]
    sock = socket_pose(state)
    d_pos = float(np.linalg.norm(leg.pose.position - sock.position))
    raw = abs(wrap_angle(leg.pose.theta - sock.theta))
    d_vert = min(raw, abs(np.pi - raw))  # the rod is symmetric end-to-end
    return d_pos, d_vert


def success_insert(state: WorldState, cfg: WorldConfig, threshold_scale: float = 1.0) -> bool:
    d_pos, d_vert = insert_distances(state, cfg)
    return (
        d_pos <= cfg.insert_pos_threshold * threshold_scale
        and d_vert <= cfg.insert_angle_threshold * threshold_scale
    )


def screw_deviation(state: WorldState, cfg: WorldConfig) -> float:
    """Tilt-equivalent angle of the peg, from its in-plane offset."""
    peg = state.objects[1]
    dist = float(np.linalg.norm(peg.pose.position - state.screw_socket))
    return float(np.arctan2(dist, cfg.screw_peg_height))


def failure_screw(state: WorldState, cfg: WorldConfig) -> bool:
    return screw_deviation(state, cfg) > cfg.screw_fail_deviation


def success_screw(state: WorldState, cfg: WorldConfig) -> bool:
    return state.screw_angle >= cfg.screw_success_angle and not failure_screw(state, cfg)


def success(state: WorldState, cfg: WorldConfig, threshold_scale: float = 1.0) -> bool:
    """Pure success predicate for any task.

    ``threshold_scale`` > 1 relaxes the insert thresholds (training
    curriculum); evaluation always runs at 1.
    """
    if state.task == "stabilize":
        return success_stabilize(state, cfg)
    if state.task == "reach_grasp":
        return success_reach_grasp(state, cfg)
    if state.task == "insert":
        return success_insert(state, cfg, threshold_scale)
    if state.task == "screw":
        return success_screw(state, cfg)
    raise ValueError(f"unknown task {state.task!r}")


# --- rewards ---------------------------------------------------------------

def reward_stabilize(state: WorldState, action_norm: float, spec: TaskSpec, cfg: WorldConfig) -> float:
    w = spec.weights
    r = w["success"] * float(success_stabilize(state, cfg))
    r -= w["qd"] * float(np.linalg.norm(state.qd))
    r -= w["action"] * action_norm
    return r


def reach_grasp_distance(state: WorldState, cfg: WorldConfig) -> float:
    """Shaping term d = 1 - tanh((10/4) * sum of four approach distances)."""
    leg = state.objects[0]
    target = shapes.grasp_point(leg.shape, leg.pose)
    pose = ee_pose(state.joints.q, state.robot.gripper_length)
    theta = pose[2]
    normal = np.array([-np.sin(theta), np.cos(theta)])
    half = 0.5 * state.joints.gripper_width
    d_eef = float(np.linalg.norm(pose[:2] - target))
    d_left = float(np.linalg.norm(pose[:2] + half * normal - target))
    d_right = float(np.linalg.norm(pose[:2] - half * normal - target))
    d_orth = shapes.orthogonal_distance(leg.shape, leg.pose, theta)
    return float(1.0 - np.tanh(2.5 * (d_eef + d_left + d_right + d_orth)))


def reward_reach_grasp(state: WorldState, spec: TaskSpec, cfg: WorldConfig) -> float:
    w = spec.weights
    r = w["distance"] * reach_grasp_distance(state, cfg)
    r += w["lifted"] * float(lifted(state, cfg, cfg.partial_lift_threshold))
    r += w["success"] * float(success_reach_grasp(state, cfg))
    return r


def reward_insert(
    state: WorldState, spec: TaskSpec, cfg: WorldConfig, threshold_scale: float = 1.0
) -> float:
    w = spec.weights
    d_pos, d_vert = insert_distances(state, cfg)
    d = float(1.0 - np.tanh(5.0 * (d_pos + d_vert)))
    return w["distance"] * d + w["success"] * float(success_insert(state, cfg, threshold_scale))


def reward_screw(state: WorldState, spec: TaskSpec, cfg: WorldConfig) -> float:
    w = spec.weights
    fail = failure_screw(state, cfg)
    r = (1.0 - float(fail)) * (
        w["screw"] * state.screw_angle + w["success"] * float(success_screw(state, cfg))
    )
    r -= w["deviation"] * screw_deviation(state, cfg)
    return r
