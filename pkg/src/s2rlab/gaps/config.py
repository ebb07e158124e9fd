"""Gap injector configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

GAP_VARIANTS = (
    "none",
    "perception_error",
    "underactuated_controller",
    "embodiment_mismatch",
    "dynamics_difference",
    "asset_mismatch",
)

_DEFAULTS = {
    "none": {},
    # jitter applied to a fraction of points, per-observation trigger probability
    "perception_error": {"trigger_prob": 0.6, "point_fraction": 0.25, "std": 0.03, "clip": 0.03},
    # early-stopping factor range for the joint controller
    "underactuated_controller": {"gamma_lo": 0.80, "gamma_hi": 0.95},
    # fraction of the gripper length removed
    "embodiment_mismatch": {"length_fraction": 0.30},
    # multiplier on object friction
    "dynamics_difference": {"friction_factor": 3.0},
    # replacement shape for objects of the source tag
    "asset_mismatch": {"shape": "disk_with_stem", "source": "rod"},
}


@dataclass(frozen=True)
class GapConfig:
    variant: str = "none"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in GAP_VARIANTS:
            raise ValueError(f"unknown gap variant {self.variant!r}")
        merged = dict(_DEFAULTS[self.variant])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise ValueError(f"unknown parameters for {self.variant}: {sorted(unknown)}")
        merged.update(self.params)
        if self.variant == "perception_error" and not 0.0 <= merged["trigger_prob"] <= 1.0:
            raise ValueError("trigger probability must be in [0, 1]")
        if self.variant == "underactuated_controller":
            lo, hi = merged["gamma_lo"], merged["gamma_hi"]
            if not (0.0 < lo <= hi < 1.0):
                raise ValueError("gamma bounds must satisfy 0 < lo <= hi < 1")
        object.__setattr__(self, "params", merged)

    def to_dict(self) -> dict:
        return {"variant": self.variant, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "GapConfig":
        return cls(d["variant"], dict(d.get("params", {})))
