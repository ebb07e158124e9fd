"""Student dataset rows: materialized observations + relabeled joint targets."""

from __future__ import annotations

import numpy as np

from ..cloud.synth import LabeledPointCloud, synthesize_scene
from ..control.relabel import relabel
from ..world.observe import proprio_vector
from ..world.types import WorldState


def rows_from_trajectories(trajectories: list[dict], cloud_budget: int) -> list[dict]:
    """Relabel harvested teacher trajectories into supervised rows.

    One row per (observation, joint target, gripper bit); the cloud is
    synthesized from the recorded world snapshot at the requested budget.
    """
    rows = []
    for traj in trajectories:
        for step, target in relabel(traj["steps"]):
            state = WorldState.from_dict(step["state"])
            cloud = synthesize_scene(state, cloud_budget)
            rows.append(
                {
                    "cloud": cloud.to_flat(),
                    "proprio": proprio_vector(state).tolist(),
                    "target_q": target.q.tolist(),
                    "target_grip": int(target.gripper),
                }
            )
    return rows


def stack_rows(rows: list[dict], idx: np.ndarray):
    """Gather rows into batched arrays (points, labels, proprio, q, grip)."""
    clouds = [LabeledPointCloud.from_flat(rows[i]["cloud"]) for i in idx]
    points = np.stack([c.points for c in clouds])
    labels = np.stack([c.labels for c in clouds])
    proprio = np.stack([np.asarray(rows[i]["proprio"]) for i in idx])
    target_q = np.stack([np.asarray(rows[i]["target_q"]) for i in idx])
    target_grip = np.array([rows[i]["target_grip"] for i in idx], dtype=np.float64)
    return points, labels, proprio, target_q, target_grip
