"""Environment wrappers that manufacture the "real" MDP.

Each wrapper perturbs exactly one of: observations (perception), actuation
(underactuated controller), robot geometry (embodiment), object physics
(dynamics), or asset shapes. Rewards and success predicates are never
touched. Wrappers with neutral parameters are exact identities.
"""

from __future__ import annotations

import numpy as np

from ..cloud.synth import LabeledPointCloud
from ..world.types import JointTarget
from ..world.world import Obs, PlanarWorld
from .config import GapConfig


def perturb_cloud(
    cloud: LabeledPointCloud,
    rng: np.random.Generator,
    trigger_prob: float = 0.6,
    point_fraction: float = 0.25,
    std: float = 0.03,
    clip: float = 0.03,
) -> LabeledPointCloud:
    """Jitter a fixed fraction of points with clipped Gaussian noise.

    With probability ``1 - trigger_prob`` the observation passes through
    unchanged. Labels are never modified.
    """
    if rng.uniform() >= trigger_prob:
        return cloud
    n = len(cloud)
    count = int(np.floor(point_fraction * n))
    if count == 0:
        return cloud
    points = cloud.points.copy()
    idx = rng.choice(n, size=count, replace=False)
    noise = rng.normal(0.0, std, size=(count, 2))
    points[idx] += np.clip(noise, -clip, clip)
    return LabeledPointCloud(points, cloud.labels.copy())


def underactuate(
    q: np.ndarray, q_goal: np.ndarray, rng: np.random.Generator,
    gamma_lo: float = 0.80, gamma_hi: float = 0.95,
) -> np.ndarray:
    """Effective goal after early stopping at a sampled progress fraction.

    The controller covers Gamma ~ U(lo, hi) of the distance to each new
    goal, halting at ||q - q_goal|| = (1 - Gamma) * d_q.
    """
    gamma = rng.uniform(gamma_lo, gamma_hi)
    q = np.asarray(q, dtype=np.float64)
    return q + gamma * (np.asarray(q_goal, dtype=np.float64) - q)


class PerceptionErrorGap:
    """Observation-only wrapper: world state untouched, clouds jittered."""

    def __init__(self, inner, config: GapConfig, seed: int = 0):
        if config.variant != "perception_error":
            raise ValueError("config variant mismatch")
        self.inner = inner
        self.config = config
        self._seed = seed
        self._episode = -1

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def _wrap_obs(self, obs: Obs) -> Obs:
        p = self.config.params
        episode, step = self._episode, obs.state.step
        inner_fn = obs._cloud_fn

        def build():
            # per-observation stream: reproducible regardless of access order
            rng = np.random.default_rng(
                np.random.SeedSequence([self._seed & 0x7FFFFFFF, episode, step])
            )
            return perturb_cloud(
                inner_fn(), rng, p["trigger_prob"], p["point_fraction"], p["std"], p["clip"]
            )

        return Obs(obs.state, build)

    def reset(self, seed: int) -> Obs:
        self._episode += 1
        return self._wrap_obs(self.inner.reset(seed))

    def step(self, action: JointTarget):
        obs, reward, done, info = self.inner.step(action)
        return self._wrap_obs(obs), reward, done, info


class UnderactuatedGap:
    """Actuation wrapper: every commanded goal is early-stopped."""

    def __init__(self, inner, config: GapConfig, seed: int = 0):
        if config.variant != "underactuated_controller":
            raise ValueError("config variant mismatch")
        self.inner = inner
        self.config = config
        self._seed = seed
        self._rng = np.random.default_rng(seed)

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def reset(self, seed: int) -> Obs:
        # per-episode actuation stream keyed off the episode seed
        self._rng = np.random.default_rng(
            np.random.SeedSequence([self._seed & 0x7FFFFFFF, seed & 0x7FFFFFFF, 0xAC7])
        )
        return self.inner.reset(seed)

    def step(self, action: JointTarget):
        q = self.inner.state.joints.q
        p = self.config.params
        q_eff = underactuate(q, action.q, self._rng, p["gamma_lo"], p["gamma_hi"])
        return self.inner.step(JointTarget(q_eff, action.gripper))


def wrap(env, gaps: GapConfig | list[GapConfig], seed: int = 0):
    """Stack gap injectors onto an environment.

    Physical gaps (embodiment, dynamics, asset) reconfigure the world;
    perception and actuation gaps wrap it. ``none`` is the identity.
    """
    if isinstance(gaps, GapConfig):
        gaps = [gaps]
    for i, gap in enumerate(gaps):
        gap_seed = seed + 7919 * i
        if gap.variant == "none":
            continue
        elif gap.variant == "perception_error":
            env = PerceptionErrorGap(env, gap, gap_seed)
        elif gap.variant == "underactuated_controller":
            env = UnderactuatedGap(env, gap, gap_seed)
        elif gap.variant == "embodiment_mismatch":
            env = _reconfigure(env, gripper_delta_fraction=gap.params["length_fraction"])
        elif gap.variant == "dynamics_difference":
            env = _reconfigure(env, friction_factor=gap.params["friction_factor"])
        elif gap.variant == "asset_mismatch":
            env = _reconfigure(env, shape_swap=(gap.params["source"], gap.params["shape"]))
        else:
            raise ValueError(f"unknown gap variant {gap.variant!r}")
    return env


def _reconfigure(env, gripper_delta_fraction=None, friction_factor=None, shape_swap=None):
    """Apply a physical modification through to the underlying world."""
    if isinstance(env, (PerceptionErrorGap, UnderactuatedGap)):
        env.inner = _reconfigure(env.inner, gripper_delta_fraction, friction_factor, shape_swap)
        return env
    if not isinstance(env, PlanarWorld):
        raise TypeError(f"cannot apply a physical gap to {type(env).__name__}")
    changes = {}
    if gripper_delta_fraction is not None:
        changes["gripper_length_delta"] = (
            env.mods.gripper_length_delta + gripper_delta_fraction * env.cfg.gripper_length
        )
    if friction_factor is not None:
        changes["object_friction_factor"] = env.mods.object_friction_factor * friction_factor
    if shape_swap is not None:
        changes["shape_swap"] = tuple(shape_swap)
    return env.with_mods(**changes)
