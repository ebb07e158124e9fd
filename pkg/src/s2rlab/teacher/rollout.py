"""Teacher execution adapter and successful-rollout harvesting."""

from __future__ import annotations

import numpy as np

from ..control.ik import task_space_target
from ..world.types import JointTarget
from .obs import privileged_vector
from .policy import TeacherPolicy, to_task_action


class TeacherActor:
    """Deterministic teacher behind the differential-IK wrapper."""

    def __init__(self, policy: TeacherPolicy, pos_bound: float, rot_bound: float, obs_norm=None):
        self.policy = policy
        self.pos_bound = pos_bound
        self.rot_bound = rot_bound
        self.obs_norm = obs_norm

    def task_action(self, state):
        vec = privileged_vector(state)
        if self.obs_norm is not None:
            vec = self.obs_norm.normalize(vec)
        raw = self.policy.deterministic(vec)[0]
        return to_task_action(raw, self.pos_bound, self.rot_bound)

    def __call__(self, obs) -> JointTarget:
        return task_space_target(obs.state, self.task_action(obs.state)).target


class HarvestError(RuntimeError):
    pass


def harvest(
    actor: TeacherActor,
    env_factory,
    n_success: int = 500,
    min_len: int = 20,
    seed: int = 0,
    max_attempts: int | None = None,
) -> list[dict]:
    """Collect successful teacher episodes for distillation.

    Episodes shorter than ``min_len`` or unsuccessful are discarded. Each
    kept step records the full world snapshot (for observation synthesis),
    the joint state, and the acting gripper command; a trailing entry holds
    the final joint state so relabeling has its successor.
    """
    if max_attempts is None:
        max_attempts = max(50, 20 * n_success)
    kept: list[dict] = []
    attempts = 0
    episode = 0
    while len(kept) < n_success:
        if attempts >= max_attempts:
            if not kept:
                raise HarvestError(
                    f"no successful episodes in {attempts} attempts; teacher unusable"
                )
            raise HarvestError(
                f"harvested only {len(kept)}/{n_success} in {attempts} attempts"
            )
        env = env_factory()
        ep_seed = seed + episode
        episode += 1
        attempts += 1
        obs = env.reset(ep_seed)
        steps = []
        done = False
        info = {}
        while not done:
            state = obs.state
            act = actor.task_action(state)
            target = task_space_target(state, act).target
            steps.append(
                {
                    "state": state.to_dict(),
                    "q": state.joints.q.tolist(),
                    "gripper_state": state.joints.gripper,
                    "gripper_cmd": int(act.gripper),
                    "task_action": act.to_list(),
                }
            )
            obs, _, done, info = env.step(target)
        final = obs.state
        steps.append(
            {
                "state": final.to_dict(),
                "q": final.joints.q.tolist(),
                "gripper_state": final.joints.gripper,
                "gripper_cmd": int(act.gripper),
                "task_action": act.to_list(),
            }
        )
        if info.get("success") and len(steps) - 1 >= min_len:
            kept.append({"seed": ep_seed, "steps": steps, "length": len(steps) - 1})
    return kept
