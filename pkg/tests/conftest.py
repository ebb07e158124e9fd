import numpy as np
import pytest

from s2rlab.control.ik import task_space_target
from s2rlab.hitl.experts import ScriptedExpert
from s2rlab.world import PlanarWorld


def run_expert_episode(env, task, seed, rot_step=None):
    """Roll one scripted-expert episode; returns (final obs, info, steps)."""
    if rot_step is None:
        rot_step = 0.08 if task == "screw" else 0.2
    expert = ScriptedExpert(task, rot_step=rot_step)
    obs = env.reset(seed)
    done = False
    steps = 0
    while not done:
        res = task_space_target(obs.state, expert.action(obs.state))
        obs, _, done, info = env.step(res.target)
        steps += 1
    return obs, info, steps


@pytest.fixture(scope="session")
def stabilize_env():
    return PlanarWorld("stabilize")


def rollout_states(env, seed, actions):
    """Apply a fixed action list, returning every state dict (incl. reset)."""
    obs = env.reset(seed)
    out = [obs.state.to_dict()]
    for act in actions:
        from s2rlab.world.types import JointTarget

        obs, _, done, _ = env.step(JointTarget.from_list(act))
        out.append(obs.state.to_dict())
        if done:
            break
    return out
