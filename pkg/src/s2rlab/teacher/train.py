"""Vectorized PPO training of teacher policies."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ..control.ik import task_space_target
from ..distill.evaluate import evaluate
from ..learnkit import OptimState
from ..world.randomize import RandomizationConfig
from ..world.world import PlanarWorld
from .normalize import RunningNorm
from .obs import privileged_dim, privileged_vector
from .policy import TeacherPolicy, ValueNet, to_task_action
from .ppo import PpoConfig, compute_gae, normalize_advantages, ppo_update

# per-step action authority (pos, rot); screw trades translation for rotation
ACTION_BOUNDS = {
    "stabilize": (0.025, 0.15),
    "reach_grasp": (0.025, 0.20),
    "insert": (0.020, 0.20),
    "screw": (0.008, 0.25),
}

_TOTAL_STEPS = {
    "stabilize": 400_000,
    "reach_grasp": 400_000,
    "insert": 500_000,
    "screw": 500_000,
}


@dataclass
class TeacherConfig:
    task: str
    total_steps: int
    n_envs: int = 32
    horizon: int = 32
    ppo: PpoConfig = field(default_factory=PpoConfig)
    eval_every: int = 40  # updates between evaluations
    eval_episodes: int = 20
    curriculum_ramp: float = 0.5  # fallback time-based floor (fraction of updates)
    curriculum_gate: float = 0.65  # windowed success that unlocks the next stage
    curriculum_step: float = 0.06
    domain_randomization: bool = True
    pos_bound: float = 0.025
    rot_bound: float = 0.2

    @classmethod
    def for_task(cls, task: str, total_steps: int | None = None, **kw) -> "TeacherConfig":
        pos, rot = ACTION_BOUNDS[task]
        return cls(
            task=task,
            total_steps=total_steps if total_steps is not None else _TOTAL_STEPS[task],
            pos_bound=pos,
            rot_bound=rot,
            **kw,
        )

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["ppo"] = self.ppo.to_dict()
        return d


@dataclass
class TeacherResult:
    policy: TeacherPolicy
    value: ValueNet
    config: TeacherConfig
    best_success: float
    curve: list[dict]
    seed: int
    obs_norm: RunningNorm | None = None


def _episode_seed(base: int, env_idx: int, episode: int) -> int:
    return (base * 1_000_003 + env_idx * 10_007 + episode * 101) % (2**31 - 1)


def train_teacher(config: TeacherConfig, seed: int = 0) -> TeacherResult:
    """PPO with per-episode domain randomization; keeps the best-eval policy.

    Bit-reproducible for a fixed (seed, config): environments are stepped
    in index order from seeded streams and updates are single-threaded.
    """
    task = config.task
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9E37]))
    policy = TeacherPolicy.create(privileged_dim(task), rng)
    value = ValueNet.create(privileged_dim(task), rng)
    optim = OptimState.for_params(policy.params() + value.params())
    obs_norm = RunningNorm(privileged_dim(task))
    val_norm = RunningNorm(1)

    rand = RandomizationConfig.default() if config.domain_randomization else None
    envs = [PlanarWorld(task, randomization=rand) for _ in range(config.n_envs)]
    eval_env = PlanarWorld(task)

    episodes = [0] * config.n_envs
    obs_dim = privileged_dim(task)
    obs_mat = np.zeros((config.n_envs, obs_dim))
    states = [None] * config.n_envs
    n_updates = max(1, config.total_steps // (config.n_envs * config.horizon))
    ramp_updates = max(1, int(config.curriculum_ramp * n_updates))
    window: list[bool] = []
    stage = 0.0

    def set_curriculum(c: float):
        for env in envs:
            env.curriculum = c

    def pos_bound_at(c: float) -> float:
        if task == "screw":
            return config.pos_bound * (0.15 + 0.85 * c)
        return config.pos_bound

    if config.total_steps <= 0:
        return TeacherResult(policy, value, config, 0.0, [], seed, obs_norm)

    set_curriculum(0.0)
    for i, env in enumerate(envs):
        obs = env.reset(_episode_seed(seed, i, episodes[i]))
        states[i] = obs.state
        obs_mat[i] = privileged_vector(obs.state)
    obs_norm.update(obs_mat)

    best_success = -1.0
    best_modules = None
    current_lr = config.ppo.lr
    curve: list[dict] = []
    ep_returns = [0.0] * config.n_envs
    finished_returns: list[float] = []
    finished_success: list[bool] = []
    global_step = 0

    for update in range(n_updates):
        # success-gated staging with a slow time-based floor: the stage only
        # tightens once the policy masters the current one
        if len(window) >= 40 and np.mean(window[-60:]) >= config.curriculum_gate:
            stage = min(1.0, stage + config.curriculum_step)
            window.clear()
        c = max(stage, min(1.0, update / max(ramp_updates, 1) * 0.25))
        set_curriculum(c)
        pos_b = pos_bound_at(c)
        t_obs = np.zeros((config.horizon, config.n_envs, obs_dim))
        t_act = np.zeros((config.horizon, config.n_envs, 4))
        t_logp = np.zeros((config.horizon, config.n_envs))
        t_rew = np.zeros((config.horizon, config.n_envs))
        t_done = np.zeros((config.horizon, config.n_envs))
        t_val = np.zeros((config.horizon + 1, config.n_envs))

        for t in range(config.horizon):
            norm_obs = obs_norm.normalize(obs_mat)
            actions, logps = policy.sample(norm_obs, rng)
            values = val_norm.denormalize(value.forward(norm_obs))
            t_obs[t] = norm_obs
            t_act[t] = actions
            t_logp[t] = logps
            t_val[t] = values
            for i, env in enumerate(envs):
                act = to_task_action(actions[i], pos_b, config.rot_bound)
                target = task_space_target(states[i], act).target
                obs, reward, done, info = env.step(target)
                t_rew[t, i] = reward
                t_done[t, i] = float(done)
                ep_returns[i] += reward
                if done:
                    finished_returns.append(ep_returns[i])
                    finished_success.append(bool(info.get("success")))
                    window.append(bool(info.get("success")))
                    ep_returns[i] = 0.0
                    episodes[i] += 1
                    obs = env.reset(_episode_seed(seed, i, episodes[i]))
                states[i] = obs.state
                obs_mat[i] = privileged_vector(obs.state)
            obs_norm.update(obs_mat)
            global_step += config.n_envs
        t_val[config.horizon] = val_norm.denormalize(value.forward(obs_norm.normalize(obs_mat)))

        adv = np.zeros((config.horizon, config.n_envs))
        ret = np.zeros((config.horizon, config.n_envs))
        for i in range(config.n_envs):
            adv[:, i], ret[:, i] = compute_gae(
                t_rew[:, i], t_val[:, i], t_done[:, i],
                config.ppo.gamma, config.ppo.gae_lambda,
            )
        flat_ret = ret.reshape(-1)
        val_norm.update(flat_ret[:, None])
        batch = {
            "obs": t_obs.reshape(-1, obs_dim),
            "actions": t_act.reshape(-1, 4),
            "logp": t_logp.reshape(-1),
            "advantages": normalize_advantages(adv.reshape(-1)),
            "returns": val_norm.normalize(flat_ret[:, None])[:, 0],
        }
        report = ppo_update(batch, policy, value, optim, config.ppo, rng, lr=current_lr)
        current_lr = report["lr"]

        if (update + 1) % config.eval_every == 0 or update == n_updates - 1:
            actor = _make_actor(policy, pos_bound_at(1.0), config.rot_bound, obs_norm)
            report = evaluate(
                actor, eval_env, seed_list=range(10_000, 10_000 + config.eval_episodes)
            )
            mean_ret = float(np.mean(finished_returns)) if finished_returns else 0.0
            train_sr = float(np.mean(finished_success)) if finished_success else 0.0
            curve.append(
                {
                    "step": global_step,
                    "mean_return": mean_ret,
                    "train_success": train_sr,
                    "eval_success": report["success_rate"],
                    "stage": c,
                }
            )
            finished_returns.clear()
            finished_success.clear()
            if report["success_rate"] > best_success:
                best_success = report["success_rate"]
                best_modules = copy.deepcopy(policy.to_modules())

    if best_modules is not None:
        policy = TeacherPolicy.from_modules(best_modules)
    return TeacherResult(policy, value, config, max(best_success, 0.0), curve, seed, obs_norm)


def _make_actor(policy: TeacherPolicy, pos_bound: float, rot_bound: float, obs_norm=None):
    from .rollout import TeacherActor

    return TeacherActor(policy, pos_bound, rot_bound, obs_norm)
