"""Correction dataset rows and session logs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..world.types import JointState, JointTarget


@dataclass
class CorrectionRecord:
    """One bracketed intervention: pre/post joint states, the observation
    the base policy acted on, and the base action it took."""

    flag: bool
    q_pre: JointState
    q_post: JointState
    cloud: list  # flat [x, y, label, ...]
    proprio: list
    base_action: JointTarget
    episode: int
    step: int

    def to_dict(self) -> dict:
        return {
            "flag": int(self.flag),
            "q_pre": self.q_pre.to_dict(),
            "q_post": self.q_post.to_dict(),
            "obs": {"cloud": self.cloud, "proprio": self.proprio},
            "base_action": self.base_action.to_list(),
            "episode_id": self.episode,
            "step_idx": self.step,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CorrectionRecord":
        return cls(
            flag=bool(d["flag"]),
            q_pre=JointState.from_dict(d["q_pre"]),
            q_post=JointState.from_dict(d["q_post"]),
            cloud=list(d["obs"]["cloud"]),
            proprio=list(d["obs"]["proprio"]),
            base_action=JointTarget.from_list(d["base_action"]),
            episode=int(d["episode_id"]),
            step=int(d["step_idx"]),
        )


@dataclass
class SessionStep:
    """One executed env step with provenance."""

    episode: int
    step: int
    executed_by: str  # "base" | "human"
    cloud: list
    proprio: list
    action: list  # executed JointTarget
    base_action: list  # what the base policy would have done / did
    intervened: bool

    def to_dict(self) -> dict:
        return self.__dict__.copy()

    @classmethod
    def from_dict(cls, d: dict) -> "SessionStep":
        return cls(**d)


@dataclass
class SessionLog:
    """Full collection session: every step plus episode summaries."""

    steps: list[SessionStep] = field(default_factory=list)
    episodes: list[dict] = field(default_factory=list)

    def episode_length(self, episode: int) -> int:
        return sum(1 for s in self.steps if s.episode == episode)

    def intervened_steps(self) -> list[SessionStep]:
        return [s for s in self.steps if s.executed_by == "human"]

    def robot_steps(self) -> list[SessionStep]:
        return [s for s in self.steps if s.executed_by == "base"]

    def to_rows(self) -> list[dict]:
        rows = [{"kind": "episode", **ep} for ep in self.episodes]
        rows += [{"kind": "step", **s.to_dict()} for s in self.steps]
        return rows

    @classmethod
    def from_rows(cls, rows: list[dict]) -> "SessionLog":
        log = cls()
        for row in rows:
            row = dict(row)
            kind = row.pop("kind")
            if kind == "episode":
                log.episodes.append(row)
            else:
                log.steps.append(SessionStep.from_dict(row))
        return log


def split_episodes(
    records: list[CorrectionRecord], val_fraction: float = 0.1, seed: int = 0
) -> tuple[list[CorrectionRecord], list[CorrectionRecord]]:
    """90/10 train/validation split by episode."""
    episodes = sorted({r.episode for r in records})
    rng = np.random.default_rng(seed)
    rng.shuffle(episodes)
    n_val = max(1, int(round(val_fraction * len(episodes)))) if len(episodes) > 1 else 0
    val_set = set(episodes[:n_val])
    train = [r for r in records if r.episode not in val_set]
    val = [r for r in records if r.episode in val_set]
    return train, val
