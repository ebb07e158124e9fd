"""PPO teacher training on privileged observations."""

from .obs import object_count, privileged_dim, privileged_vector
from .policy import TeacherPolicy, ValueNet, to_task_action
from .ppo import PpoConfig, compute_gae, gae_direct, normalize_advantages, ppo_update
from .rollout import HarvestError, TeacherActor, harvest
from .train import ACTION_BOUNDS, TeacherConfig, TeacherResult, train_teacher
from .io import load_teacher, save_teacher, teacher_actor
from .normalize import RunningNorm

__all__ = [
    "object_count",
    "privileged_dim",
    "privileged_vector",
    "TeacherPolicy",
    "ValueNet",
    "to_task_action",
    "PpoConfig",
    "compute_gae",
    "gae_direct",
    "normalize_advantages",
    "ppo_update",
    "HarvestError",
    "TeacherActor",
    "harvest",
    "ACTION_BOUNDS",
    "TeacherConfig",
    "TeacherResult",
    "train_teacher",
    "load_teacher",
    "save_teacher",
    "teacher_actor",
    "RunningNorm",
]
