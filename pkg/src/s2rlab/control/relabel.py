"""Action relabeling: task-space teacher trajectories become joint-position
targets by setting each step's action to the next observed joint state."""

from __future__ import annotations

import numpy as np

from ..world.types import JointTarget


def relabel(trajectory: list) -> list:
    """Relabel a recorded trajectory to (step, JointTarget(q_next)) pairs.

    ``trajectory`` is a sequence of step records carrying ``q`` (joint
    vector at that step, before acting) and the executed action's gripper
    bit as ``gripper_cmd``. The relabeled action for step t is the joint
    state observed at t+1 with the step's commanded gripper bit; the final
    step has no successor and is dropped.
    """
    if len(trajectory) < 2:
        return []
    out = []
    for cur, nxt in zip(trajectory[:-1], trajectory[1:]):
        q_next = np.asarray(nxt["q"], dtype=np.float64)
        out.append((cur, JointTarget(q_next.copy(), int(cur["gripper_cmd"]))))
    return out
