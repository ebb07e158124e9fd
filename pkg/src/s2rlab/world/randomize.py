"""Per-episode domain randomization of physical parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .types import ObjectState, RobotParams


@dataclass(frozen=True)
class RandSpec:
    kind: str  # "scaling" | "additive"
    dist: str  # "uniform" | "loguniform"
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in ("scaling", "additive"):
            raise ValueError(f"unknown randomization kind {self.kind!r}")
        if self.dist not in ("uniform", "loguniform"):
            raise ValueError(f"unknown distribution {self.dist!r}")
        if self.lo > self.hi:
            raise ValueError("bounds must be ordered")
        if self.kind == "scaling" and self.lo <= 0:
            raise ValueError("scaling bounds must be positive")

    def sample(self, rng: np.random.Generator, curriculum: float = 1.0) -> float:
        lo, hi = self.lo, self.hi
        if curriculum < 1.0:
            # shrink the range toward the identity value as curriculum -> 0
            anchor = 1.0 if self.kind == "scaling" else 0.0
            lo = anchor + (lo - anchor) * curriculum
            hi = anchor + (hi - anchor) * curriculum
        if self.dist == "loguniform":
            return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        return float(rng.uniform(lo, hi))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dist": self.dist, "lo": self.lo, "hi": self.hi}

    @classmethod
    def from_dict(cls, d: dict) -> "RandSpec":
        return cls(d["kind"], d["dist"], d["lo"], d["hi"])


def _default_entries() -> dict[str, RandSpec]:
    u, lu = "uniform", "loguniform"
    return {
        "robot_mass": RandSpec("scaling", u, 0.5, 1.5),
        "robot_friction": RandSpec("scaling", u, 0.7, 1.3),
        "joint_lower_limit": RandSpec("scaling", lu, 1.00, 1.01),
        "joint_upper_limit": RandSpec("scaling", lu, 1.00, 1.01),
        "joint_stiffness": RandSpec("scaling", lu, 1.00, 1.01),
        "joint_damping": RandSpec("scaling", lu, 1.00, 1.01),
        "object_mass": RandSpec("scaling", u, 0.5, 1.5),
        "object_friction": RandSpec("scaling", u, 0.5, 1.5),
        "object_rolling_friction": RandSpec("scaling", u, 0.5, 1.5),
        "object_torsion_friction": RandSpec("scaling", u, 0.5, 1.5),
        "object_restitution": RandSpec("additive", u, 0.0, 1.0),
        "object_compliance": RandSpec("additive", u, 0.0, 1.0),
        "gravity": RandSpec("additive", u, 0.0, 0.4),
    }


@dataclass(frozen=True)
class RandomizationConfig:
    entries: dict[str, RandSpec] = field(default_factory=_default_entries)

    @classmethod
    def default(cls) -> "RandomizationConfig":
        return cls()

    @classmethod
    def identity(cls) -> "RandomizationConfig":
        """Degenerate config: every draw is the identity value."""
        out = {}
        for name, spec in _default_entries().items():
            anchor = 1.0 if spec.kind == "scaling" else 0.0
            out[name] = RandSpec(spec.kind, "uniform", anchor, anchor)
        return cls(out)

    def scaled(self, factor: float) -> "RandomizationConfig":
        """Widen (factor > 1) or shrink each range about its identity value."""
        out = {}
        for name, spec in self.entries.items():
            anchor = 1.0 if spec.kind == "scaling" else 0.0
            lo = anchor + (spec.lo - anchor) * factor
            hi = anchor + (spec.hi - anchor) * factor
            if spec.kind == "scaling":
                lo = max(lo, 1e-3)
            out[name] = RandSpec(spec.kind, spec.dist, lo, hi)
        return RandomizationConfig(out)

    def to_dict(self) -> dict:
        return {name: spec.to_dict() for name, spec in self.entries.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "RandomizationConfig":
        return cls({name: RandSpec.from_dict(spec) for name, spec in d.items()})


def randomize_robot(
    robot: RobotParams, config: RandomizationConfig, rng: np.random.Generator,
    curriculum: float = 1.0,
) -> float:
    """Randomize robot parameters in place; returns the gravity offset."""
    e = config.entries
    robot.mass_scale *= e["robot_mass"].sample(rng, curriculum)
    robot.friction_scale *= e["robot_friction"].sample(rng, curriculum)
    robot.limit_lo *= e["joint_lower_limit"].sample(rng, curriculum)
    robot.limit_hi *= e["joint_upper_limit"].sample(rng, curriculum)
    robot.stiffness_scale *= e["joint_stiffness"].sample(rng, curriculum)
    damping = e["joint_damping"].sample(rng, curriculum)
    robot.damping_scale *= damping
    robot.max_joint_step /= damping
    return e["gravity"].sample(rng, curriculum)


def randomize_object(
    obj: ObjectState, config: RandomizationConfig, rng: np.random.Generator,
    curriculum: float = 1.0,
) -> None:
    e = config.entries
    p = obj.params
    p.mass_scale *= e["object_mass"].sample(rng, curriculum)
    p.friction_scale *= e["object_friction"].sample(rng, curriculum)
    p.rolling_friction_scale *= e["object_rolling_friction"].sample(rng, curriculum)
    p.torsion_friction_scale *= e["object_torsion_friction"].sample(rng, curriculum)
    p.restitution += e["object_restitution"].sample(rng, curriculum)
    p.compliance += e["object_compliance"].sample(rng, curriculum)
