"""Run configuration: one JSON document drives every pipeline stage.

Unknown keys are rejected; any key ending in ``_path`` must point at an
existing file when the config is loaded.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..gaps.config import GapConfig
from ..world.types import TASKS

DATA_ROOT_ENV = "TRANSIC_LAB_DATA"

# desk-scale per-task knobs
_HARVEST_MIN_LEN = {"stabilize": 20, "reach_grasp": 4, "insert": 4, "screw": 20}
_COLLECT_TRAJ = {"stabilize": 20, "reach_grasp": 30, "insert": 30, "screw": 17}

_DEFAULTS = {
    "task": "stabilize",
    "seed": 0,
    "out": None,  # resolved from TRANSIC_LAB_DATA when unset
    "cloud_budget": 128,
    "gaps": [],  # ordered list of {variant, params}
    "teacher": {
        "total_steps": None,  # None -> per-task default
        "n_envs": 32,
        "eval_every": 30,
        "eval_episodes": 20,
    },
    "harvest": {
        "n_success": 120,
        "min_len": None,  # None -> per-task default
    },
    "paired": {"n_scenes": 59},
    "distill": {
        "steps": 2500,
        "batch_size": 32,
        "beta": 1e-3,
        "paired_batch": 8,
        "warmup_steps": 100,
        "cosine_decay_steps": 20000,
        "eval_every": 500,
        "eval_episodes": 20,
        "augment": True,
        "extra_randomization": 1.0,  # harvest-time DR range multiplier
    },
    "collect": {
        "n_traj": None,  # None -> per-task default
        "stuck_patience": 6,
        "recover_margin": 0.03,
        "max_correction_steps": 25,
        "target_band": [0.1, 0.35],
    },
    "residual": {
        "stage1_steps": 1500,
        "stage2_steps": 600,
        "batch_size": 16,
        "warmup_steps": 100,
        "gate_threshold": 0.5,
    },
    "baseline": {
        "steps": 2100,
        "batch_size": 16,
        "warmup_steps": 100,
    },
    "eval": {"seeds": list(range(20))},
    "teacher_path": None,
    "student_path": None,
    "residual_path": None,
    "dataset_path": None,
    "serve": {"port": 8710, "tick_hz": 20, "cloud_preview": 256},
}


class ConfigError(ValueError):
    pass


def _merge(defaults, override, trail=""):
    if isinstance(defaults, dict):
        if not isinstance(override, dict):
            raise ConfigError(f"{trail or 'config'}: expected an object")
        unknown = set(override) - set(defaults)
        if unknown:
            raise ConfigError(f"{trail or 'config'}: unknown keys {sorted(unknown)}")
        out = {}
        for key, dval in defaults.items():
            if key in override:
                out[key] = _merge(dval, override[key], f"{trail}.{key}".lstrip("."))
            else:
                out[key] = json.loads(json.dumps(dval))
        return out
    return override


@dataclass
class RunConfig:
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        merged = _merge(_DEFAULTS, d)
        if merged["task"] not in TASKS:
            raise ConfigError(f"unknown task {merged['task']!r}")
        # validate gap entries eagerly
        merged["gaps"] = [GapConfig.from_dict(g).to_dict() for g in merged["gaps"]]
        cfg = cls(merged)
        cfg._check_paths()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def _check_paths(self) -> None:
        for key, value in self.raw.items():
            if key.endswith("_path") and value is not None and not Path(value).exists():
                raise ConfigError(f"{key}: no such file {value}")

    # -- accessors --------------------------------------------------------------

    @property
    def task(self) -> str:
        return self.raw["task"]

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def cloud_budget(self) -> int:
        return int(self.raw["cloud_budget"])

    def gap_configs(self) -> list[GapConfig]:
        return [GapConfig.from_dict(g) for g in self.raw["gaps"]]

    def out_dir(self) -> Path:
        if self.raw["out"]:
            return Path(self.raw["out"])
        root = os.environ.get(DATA_ROOT_ENV, "data")
        return Path(root) / self.task

    def harvest_min_len(self) -> int:
        v = self.raw["harvest"]["min_len"]
        return int(v) if v is not None else _HARVEST_MIN_LEN[self.task]

    def collect_n_traj(self) -> int:
        v = self.raw["collect"]["n_traj"]
        return int(v) if v is not None else _COLLECT_TRAJ[self.task]

    def to_json(self) -> str:
        return json.dumps(self.raw, indent=2)
