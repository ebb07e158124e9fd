"""Action-space distillation into point-cloud students, plus evaluation."""

from .dataset import rows_from_trajectories, stack_rows
from .evaluate import DEFAULT_EVAL_SEEDS, evaluate
from .io import load_student, read_rows, save_student, write_rows
from .student import StudentConfig, StudentPolicy
from .train import (
    ConfigError,
    DistillConfig,
    StudentResult,
    regularizer_value,
    student_loss,
    train_student,
)

__all__ = [
    "rows_from_trajectories",
    "stack_rows",
    "DEFAULT_EVAL_SEEDS",
    "evaluate",
    "load_student",
    "read_rows",
    "save_student",
    "write_rows",
    "StudentConfig",
    "StudentPolicy",
    "ConfigError",
    "DistillConfig",
    "StudentResult",
    "regularizer_value",
    "student_loss",
    "train_student",
]
