"""Planar N-link arm world: tasks, rewards, domain randomization."""

from .types import (
    TASKS,
    BodyPose,
    JointState,
    JointTarget,
    ObjectParams,
    ObjectState,
    RobotParams,
    TaskSpaceAction,
    WorldState,
    wrap_angle,
)
from .kinematics import LINK_LENGTHS, ee_pose, finger_positions, jacobian, joint_positions, solve_ik
from .tasks import TaskSpec, WorldConfig, default_task_spec, success
from .randomize import RandomizationConfig, RandSpec
from .world import Obs, PlanarWorld, WorldMods
from .observe import PROPRIO_DIM, proprio_vector

__all__ = [
    "TASKS",
    "BodyPose",
    "JointState",
    "JointTarget",
    "ObjectParams",
    "ObjectState",
    "RobotParams",
    "TaskSpaceAction",
    "WorldState",
    "wrap_angle",
    "LINK_LENGTHS",
    "ee_pose",
    "finger_positions",
    "jacobian",
    "joint_positions",
    "solve_ik",
    "TaskSpec",
    "WorldConfig",
    "default_task_spec",
    "success",
    "RandomizationConfig",
    "RandSpec",
    "Obs",
    "PlanarWorld",
    "WorldMods",
    "PROPRIO_DIM",
    "proprio_vector",
]
