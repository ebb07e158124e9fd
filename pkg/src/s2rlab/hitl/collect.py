"""Intervention-and-correction collection loop.

Per step the base policy acts; the operator inspects the transition and,
when it intervenes, streams task-space corrections through the IK adapter
until release. The pre/post joint states bracket one CorrectionRecord; the
session log keeps every executed step with provenance.
"""

from __future__ import annotations

from ..control.ik import task_space_target
from ..world.observe import proprio_vector
from .operator import OperatorDisconnect
from .records import CorrectionRecord, SessionLog, SessionStep


def _obs_row(obs) -> tuple[list, list]:
    return obs.cloud.to_flat(), proprio_vector(obs.state).tolist()


def collect(
    base_policy,
    env,
    operator,
    n_traj: int,
    seed: int = 0,
) -> tuple[list[CorrectionRecord], SessionLog]:
    """Run ``n_traj`` episodes of synchronized deployment with corrections.

    Returns the correction dataset plus the full session log. Episodes where
    a live operator disconnects are discarded from both and noted in the
    episode summaries.
    """
    records: list[CorrectionRecord] = []
    log = SessionLog()
    for ep in range(n_traj):
        ep_seed = seed + ep
        operator.start_episode()
        obs = env.reset(ep_seed)
        ep_records: list[CorrectionRecord] = []
        ep_steps: list[SessionStep] = []
        done = False
        info: dict = {}
        step_idx = 0
        discarded = False
        try:
            while not done:
                base_target = base_policy(obs)
                cloud_row, proprio_row = _obs_row(obs)
                obs_next, _, done, info = env.step(base_target)
                ep_steps.append(
                    SessionStep(
                        episode=ep, step=step_idx, executed_by="base",
                        cloud=cloud_row, proprio=proprio_row,
                        action=base_target.to_list(), base_action=base_target.to_list(),
                        intervened=False,
                    )
                )
                step_idx += 1
                if not done and operator.intervene(obs, obs_next):
                    q_pre = obs_next.state.joints.clone()
                    operator.begin_correction(obs_next)
                    corr = 0
                    while not done and not operator.release(obs_next, corr):
                        act = operator.correct_action(obs_next)
                        target = task_space_target(obs_next.state, act).target
                        c_row, p_row = _obs_row(obs_next)
                        obs_next, _, done, info = env.step(target)
                        ep_steps.append(
                            SessionStep(
                                episode=ep, step=step_idx, executed_by="human",
                                cloud=c_row, proprio=p_row,
                                action=target.to_list(), base_action=base_target.to_list(),
                                intervened=True,
                            )
                        )
                        step_idx += 1
                        corr += 1
                    q_post = obs_next.state.joints.clone()
                    ep_records.append(
                        CorrectionRecord(
                            flag=True,
                            q_pre=q_pre,
                            q_post=q_post,
                            cloud=cloud_row,
                            proprio=proprio_row,
                            base_action=base_target,
                            episode=ep,
                            step=step_idx - corr,
                        )
                    )
                obs = obs_next
        except OperatorDisconnect:
            discarded = True
        if discarded:
            log.episodes.append(
                {"episode": ep, "seed": ep_seed, "discarded": True, "success": False,
                 "steps": 0, "corrections": 0}
            )
            continue
        records.extend(ep_records)
        log.steps.extend(ep_steps)
        log.episodes.append(
            {
                "episode": ep,
                "seed": ep_seed,
                "discarded": False,
                "success": bool(info.get("success", False)),
                "steps": step_idx,
                "corrections": len(ep_records),
            }
        )
    return records, log
