"""Teacher checkpoint serialization."""

from __future__ import annotations

from pathlib import Path

from ..learnkit import load_checkpoint, save_checkpoint
from .normalize import RunningNorm
from .policy import TeacherPolicy, ValueNet
from .rollout import TeacherActor
from .train import TeacherConfig, TeacherResult


def save_teacher(path: str | Path, result: TeacherResult) -> None:
    modules = {f"policy_{k}": v for k, v in result.policy.to_modules().items()}
    modules.update({f"value_{k}": v for k, v in result.value.to_modules().items()})
    meta = {
        "task": result.config.task,
        "config": result.config.to_dict(),
        "obs_norm": result.obs_norm.to_dict() if result.obs_norm else None,
        "best_success": result.best_success,
        "curve": result.curve,
        "seed": result.seed,
    }
    save_checkpoint(path, kind="teacher", modules=modules, meta=meta)


def load_teacher(path: str | Path) -> TeacherResult:
    doc = load_checkpoint(path)
    if doc["kind"] != "teacher":
        raise ValueError(f"{path}: expected a teacher checkpoint, got {doc['kind']!r}")
    mods = doc["modules"]
    policy = TeacherPolicy.from_modules(
        {k.removeprefix("policy_"): v for k, v in mods.items() if k.startswith("policy_")}
    )
    value = ValueNet.from_modules(
        {k.removeprefix("value_"): v for k, v in mods.items() if k.startswith("value_")}
    )
    meta = doc["meta"]
    cfg_d = dict(meta["config"])
    from .ppo import PpoConfig

    cfg_d["ppo"] = PpoConfig.from_dict(cfg_d["ppo"])
    config = TeacherConfig(**cfg_d)
    obs_norm = RunningNorm.from_dict(meta["obs_norm"]) if meta["obs_norm"] else None
    return TeacherResult(
        policy, value, config, meta["best_success"], meta["curve"], meta["seed"], obs_norm
    )


def teacher_actor(result: TeacherResult) -> TeacherActor:
    return TeacherActor(
        result.policy, result.config.pos_bound, result.config.rot_bound, result.obs_norm
    )
