"""Core state/action/config types for the planar arm world."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

TASKS = ("stabilize", "reach_grasp", "insert", "screw")


def wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    w = float((theta + np.pi) % (2.0 * np.pi) - np.pi)
    return np.pi if w == -np.pi else w


@dataclass
class JointState:
    """Arm joint angles plus gripper open(1)/closed(0) bit and finger width."""

    q: np.ndarray
    gripper: int = 1
    gripper_width: float = 0.08

    def clone(self) -> "JointState":
        return JointState(self.q.copy(), self.gripper, self.gripper_width)

    def to_dict(self) -> dict:
        return {"q": self.q.tolist(), "gripper": self.gripper, "gripper_width": self.gripper_width}

    @classmethod
    def from_dict(cls, d: dict) -> "JointState":
        return cls(np.asarray(d["q"], dtype=np.float64), int(d["gripper"]), float(d["gripper_width"]))


@dataclass
class BodyPose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        self.theta = wrap_angle(self.theta)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def clone(self) -> "BodyPose":
        return BodyPose(self.x, self.y, self.theta)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "theta": self.theta}

    @classmethod
    def from_dict(cls, d: dict) -> "BodyPose":
        return cls(d["x"], d["y"], d["theta"])


@dataclass
class TaskSpaceAction:
    """End-effector delta command: translation, rotation, gripper bit."""

    dx: float = 0.0
    dy: float = 0.0
    dtheta: float = 0.0
    gripper: int = 1

    def to_list(self) -> list:
        return [self.dx, self.dy, self.dtheta, self.gripper]

    @classmethod
    def from_list(cls, v) -> "TaskSpaceAction":
        return cls(float(v[0]), float(v[1]), float(v[2]), int(v[3]))


@dataclass
class JointTarget:
    """Absolute joint-position command plus gripper bit."""

    q: np.ndarray
    gripper: int = 1

    def clone(self) -> "JointTarget":
        return JointTarget(self.q.copy(), self.gripper)

    def to_list(self) -> list:
        return [*self.q.tolist(), self.gripper]

    @classmethod
    def from_list(cls, v) -> "JointTarget":
        return cls(np.asarray(v[:-1], dtype=np.float64), int(v[-1]))


@dataclass
class ObjectParams:
    mass_scale: float = 1.0
    friction_scale: float = 1.0
    rolling_friction_scale: float = 1.0
    torsion_friction_scale: float = 1.0
    restitution: float = 0.0
    compliance: float = 0.0

    def clone(self) -> "ObjectParams":
        return replace(self)

    def to_dict(self) -> dict:
        return self.__dict__.copy()

    @classmethod
    def from_dict(cls, d: dict) -> "ObjectParams":
        return cls(**d)


@dataclass
class ObjectState:
    shape: str
    pose: BodyPose
    params: ObjectParams = field(default_factory=ObjectParams)
    graspable: bool = False
    pushable: bool = True
    static: bool = False

    def clone(self) -> "ObjectState":
        return ObjectState(
            self.shape, self.pose.clone(), self.params.clone(),
            self.graspable, self.pushable, self.static,
        )

    def to_dict(self) -> dict:
        return {
            "shape": self.shape,
            "pose": self.pose.to_dict(),
            "params": self.params.to_dict(),
            "graspable": self.graspable,
            "pushable": self.pushable,
            "static": self.static,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObjectState":
        return cls(
            d["shape"], BodyPose.from_dict(d["pose"]), ObjectParams.from_dict(d["params"]),
            d["graspable"], d["pushable"], d["static"],
        )


@dataclass
class RobotParams:
    """Per-episode physical parameters (some affected by randomization)."""

    mass_scale: float = 1.0
    friction_scale: float = 1.0
    limit_lo: np.ndarray = field(default_factory=lambda: np.full(3, -2.9))
    limit_hi: np.ndarray = field(default_factory=lambda: np.full(3, 2.9))
    stiffness_scale: float = 1.0
    damping_scale: float = 1.0
    gripper_length: float = 0.10
    max_joint_step: float = 0.1

    def clone(self) -> "RobotParams":
        return RobotParams(
            self.mass_scale, self.friction_scale, self.limit_lo.copy(), self.limit_hi.copy(),
            self.stiffness_scale, self.damping_scale, self.gripper_length, self.max_joint_step,
        )

    def to_dict(self) -> dict:
        return {
            "mass_scale": self.mass_scale,
            "friction_scale": self.friction_scale,
            "limit_lo": self.limit_lo.tolist(),
            "limit_hi": self.limit_hi.tolist(),
            "stiffness_scale": self.stiffness_scale,
            "damping_scale": self.damping_scale,
            "gripper_length": self.gripper_length,
            "max_joint_step": self.max_joint_step,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RobotParams":
        return cls(
            d["mass_scale"], d["friction_scale"],
            np.asarray(d["limit_lo"]), np.asarray(d["limit_hi"]),
            d["stiffness_scale"], d["damping_scale"], d["gripper_length"], d["max_joint_step"],
        )


@dataclass
class WorldState:
    """Full snapshot of one simulation instant."""

    task: str
    step: int
    episode_seed: int
    joints: JointState
    robot: RobotParams
    objects: list[ObjectState]
    gravity_offset: float = 0.0
    attached: int = -1
    attach_rel_pos: np.ndarray = field(default_factory=lambda: np.zeros(2))
    attach_rel_theta: float = 0.0
    qd: np.ndarray = field(default_factory=lambda: np.zeros(3))
    ee_vel: np.ndarray = field(default_factory=lambda: np.zeros(3))
    contacts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    object_vel: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    object_init_pos: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    screw_angle: float = 0.0
    screw_socket: np.ndarray | None = None

    def clone(self) -> "WorldState":
        return WorldState(
            task=self.task,
            step=self.step,
            episode_seed=self.episode_seed,
            joints=self.joints.clone(),
            robot=self.robot.clone(),
            objects=[o.clone() for o in self.objects],
            gravity_offset=self.gravity_offset,
            attached=self.attached,
            attach_rel_pos=self.attach_rel_pos.copy(),
            attach_rel_theta=self.attach_rel_theta,
            qd=self.qd.copy(),
            ee_vel=self.ee_vel.copy(),
            contacts=self.contacts.copy(),
            object_vel=self.object_vel.copy(),
            object_init_pos=self.object_init_pos.copy(),
            screw_angle=self.screw_angle,
            screw_socket=None if self.screw_socket is None else self.screw_socket.copy(),
        )

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "step": self.step,
            "episode_seed": self.episode_seed,
            "joints": self.joints.to_dict(),
            "robot": self.robot.to_dict(),
            "objects": [o.to_dict() for o in self.objects],
            "gravity_offset": self.gravity_offset,
            "attached": self.attached,
            "attach_rel_pos": self.attach_rel_pos.tolist(),
            "attach_rel_theta": self.attach_rel_theta,
            "qd": self.qd.tolist(),
            "ee_vel": self.ee_vel.tolist(),
            "contacts": self.contacts.astype(int).tolist(),
            "object_vel": self.object_vel.tolist(),
            "object_init_pos": self.object_init_pos.tolist(),
            "screw_angle": self.screw_angle,
            "screw_socket": None if self.screw_socket is None else self.screw_socket.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WorldState":
        return cls(
            task=d["task"],
            step=d["step"],
            episode_seed=d["episode_seed"],
            joints=JointState.from_dict(d["joints"]),
            robot=RobotParams.from_dict(d["robot"]),
            objects=[ObjectState.from_dict(o) for o in d["objects"]],
            gravity_offset=d["gravity_offset"],
            attached=d["attached"],
            attach_rel_pos=np.asarray(d["attach_rel_pos"]),
            attach_rel_theta=d["attach_rel_theta"],
            qd=np.asarray(d["qd"]),
            ee_vel=np.asarray(d["ee_vel"]),
            contacts=np.asarray(d["contacts"], dtype=bool),
            object_vel=np.asarray(d["object_vel"]).reshape(-1, 3),
            object_init_pos=np.asarray(d["object_init_pos"]).reshape(-1, 2),
            screw_angle=d["screw_angle"],
            screw_socket=None if d["screw_socket"] is None else np.asarray(d["screw_socket"]),
        )
