"""Fixed-seed deterministic evaluation shared by every method."""

from __future__ import annotations

import numpy as np

DEFAULT_EVAL_SEEDS = tuple(range(20))


def evaluate(policy_fn, env, seed_list=DEFAULT_EVAL_SEEDS) -> dict:
    """Roll deterministic episodes on a fixed seed list.

    ``policy_fn`` maps an observation to a JointTarget. Every method under
    comparison must be fed the same seed list so initial conditions match.
    """
    seeds = list(seed_list)
    if not seeds:
        raise ValueError("seed_list must not be empty")
    episodes = []
    for seed in seeds:
        obs = env.reset(seed)
        done = False
        steps = 0
        total = 0.0
        info = {}
        while not done:
            obs, reward, done, info = env.step(policy_fn(obs))
            total += reward
            steps += 1
        episodes.append(
            {
                "seed": int(seed),
                "success": bool(info.get("success", False)),
                "steps": steps,
                "return": float(total),
            }
        )
    rate = float(np.mean([e["success"] for e in episodes]))
    return {"success_rate": rate, "episodes": episodes, "n": len(episodes)}
