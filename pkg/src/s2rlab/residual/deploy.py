"""Gated residual deployment: base policy plus gated corrective deltas."""

from __future__ import annotations

import numpy as np

from ..distill.evaluate import evaluate
from ..world.types import JointTarget
from .algebra import apply_residual
from .policy import ResidualPolicy

GATE_MODES = ("learned", "human", "off", "always")


class GatedPolicy:
    """pi_deployed = pi_base (+) 1_gate * pi_residual.

    Modes: ``learned`` thresholds the gate head, ``human`` consults an
    external flag callable, ``off`` never applies the residual (bitwise the
    base policy), ``always`` applies it unconditionally.
    """

    def __init__(
        self,
        base,
        residual: ResidualPolicy | None,
        mode: str = "learned",
        threshold: float = 0.5,
        human_flag=None,
    ):
        if mode not in GATE_MODES:
            raise ValueError(f"unknown gate mode {mode!r}")
        if mode != "off" and residual is None:
            raise ValueError("residual policy required unless mode is 'off'")
        self.base = base
        self.residual = residual
        self.mode = mode
        self.threshold = threshold
        self.human_flag = human_flag
        self.steps = 0
        self.fired = 0

    @property
    def gate_rate(self) -> float:
        return self.fired / self.steps if self.steps else 0.0

    def reset_counters(self) -> None:
        self.steps = 0
        self.fired = 0

    def __call__(self, obs) -> JointTarget:
        base_action = self.base(obs)
        self.steps += 1
        if self.mode == "off":
            return base_action
        res, gate_p = self.residual.act_and_gate(obs, base_action)
        if self.mode == "learned":
            fire = gate_p > self.threshold
        elif self.mode == "always":
            fire = True
        else:  # human
            fire = bool(self.human_flag(obs)) if self.human_flag else False
        if not fire:
            return base_action
        self.fired += 1
        robot = obs.state.robot
        return apply_residual(base_action, res, robot.limit_lo, robot.limit_hi)


def deploy(base, residual, env, seed_list, mode: str = "learned",
           threshold: float = 0.5, human_flag=None) -> dict:
    """Fixed-seed evaluation of the integrated policy; reports the success
    rate, the gate firing rate, and the per-episode log."""
    policy = GatedPolicy(base, residual, mode, threshold, human_flag)
    report = evaluate(policy, env, seed_list)
    report["gate_rate"] = policy.gate_rate
    report["mode"] = mode
    return report
