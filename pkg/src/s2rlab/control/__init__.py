"""Task-space and joint-space controllers plus action relabeling."""

from ..world.types import JointTarget, TaskSpaceAction
from .ik import IkResult, ik_step, joint_controller
from .relabel import relabel

__all__ = ["JointTarget", "TaskSpaceAction", "IkResult", "ik_step", "joint_controller", "relabel"]
