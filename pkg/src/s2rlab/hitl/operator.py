"""Operator contract and the scripted oracle operator.

An operator answers two queries during collection: whether to intervene
after seeing a transition, and a stream of task-space corrections until it
releases control. The oracle automates the human for CI and batch runs; a
live operator (gateway service) implements the same contract over a
websocket.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..world import tasks
from ..world.types import TaskSpaceAction
from .experts import ScriptedExpert


class OperatorDisconnect(RuntimeError):
    """Raised by live operators on timeout; the episode is discarded."""


@dataclass(frozen=True)
class OracleThresholds:
    stuck_patience: int = 6  # steps without progress before intervening
    stuck_epsilon: float = 1e-3  # minimum per-step progress improvement
    regress_margin: float = 0.05  # progress drop from the episode peak
    recover_margin: float = 0.03  # progress gain needed to release
    max_correction_steps: int = 25
    failure_fraction: float = 0.6  # screw deviation fraction that triggers


class OracleOperator:
    """Privileged scripted operator: intervenes on stalls, regressions, or
    imminent screw failure; corrects by driving the expert plan."""

    def __init__(self, task: str, thresholds: OracleThresholds | None = None,
                 cfg: tasks.WorldConfig | None = None):
        self.task = task
        self.th = thresholds or OracleThresholds()
        self.cfg = cfg or tasks.WorldConfig()
        rot = 0.08 if task == "screw" else 0.2
        self.expert = ScriptedExpert(task, cfg=self.cfg, rot_step=rot)
        self.start_episode()

    def start_episode(self) -> None:
        self._stall = 0
        self._best = -np.inf
        self._last = None
        self._intervene_start = None

    def _progress(self, obs) -> float:
        return self.expert.progress(obs.state)

    def intervene(self, obs, obs_next) -> bool:
        p = self._progress(obs_next)
        if self._last is not None and p - self._last < self.th.stuck_epsilon:
            self._stall += 1
        else:
            self._stall = 0
        self._last = p
        self._best = max(self._best, p)
        if self.task == "screw":
            dev = tasks.screw_deviation(obs_next.state, self.cfg)
            if dev > self.th.failure_fraction * self.cfg.screw_fail_deviation:
                return True
        if p < self._best - self.th.regress_margin:
            return True
        return self._stall >= self.th.stuck_patience

    def begin_correction(self, obs) -> None:
        self._intervene_start = self._progress(obs)

    def correct_action(self, obs) -> TaskSpaceAction:
        return self.expert.action(obs.state)

    def release(self, obs, steps_in_correction: int) -> bool:
        if steps_in_correction >= self.th.max_correction_steps:
            return True
        gained = self._progress(obs) - self._intervene_start
        if gained >= self.th.recover_margin:
            # reset the stall tracker so control is handed back cleanly
            self._stall = 0
            self._last = self._progress(obs)
            self._best = max(self._best, self._last)
            return True
        return False


class NeverOperator:
    """Watches only; collection degenerates to autonomous rollouts."""

    def start_episode(self):
        pass

    def intervene(self, obs, obs_next) -> bool:
        return False

    def begin_correction(self, obs):
        pass

    def correct_action(self, obs):
        raise RuntimeError("never intervenes")

    def release(self, obs, steps_in_correction) -> bool:
        return True


class AlwaysTeleopOperator:
    """Full-teleoperation demonstrations: the expert drives every step."""

    def __init__(self, task: str, cfg: tasks.WorldConfig | None = None):
        rot = 0.08 if task == "screw" else 0.2
        self.expert = ScriptedExpert(task, cfg=cfg, rot_step=rot)

    def start_episode(self):
        pass

    def intervene(self, obs, obs_next) -> bool:
        return True

    def begin_correction(self, obs):
        pass

    def correct_action(self, obs) -> TaskSpaceAction:
        return self.expert.action(obs.state)

    def release(self, obs, steps_in_correction) -> bool:
        return steps_in_correction >= 1
