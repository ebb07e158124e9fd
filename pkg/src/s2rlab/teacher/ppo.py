"""GAE and the clipped-surrogate PPO update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..learnkit import OptimState, adam_step
from .policy import TeacherPolicy, ValueNet


@dataclass(frozen=True)
class PpoConfig:
    lr: float = 5e-4
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_eps: float = 0.2
    critic_weight: float = 4.0
    entropy_weight: float = 0.0
    epochs: int = 3
    minibatches: int = 4
    # adaptive step size keyed on the policy KL, as in common PPO trainers
    kl_target: float = 0.008
    adaptive_lr: bool = True
    lr_min: float = 1e-6
    lr_max: float = 1e-2

    def __post_init__(self):
        if not (0.0 <= self.gamma < 1.0 and 0.0 <= self.gae_lambda <= 1.0):
            raise ValueError("gamma/lambda out of range")
        if self.clip_eps <= 0:
            raise ValueError("clip epsilon must be positive")

    def to_dict(self) -> dict:
        return self.__dict__.copy()

    @classmethod
    def from_dict(cls, d: dict) -> "PpoConfig":
        return cls(**d)


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    gamma: float,
    lam: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Recursive generalized advantage estimation.

    ``values`` carries one bootstrap entry beyond the rewards. Episode
    boundaries are cut by ``dones``.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    t_len = len(rewards)
    if len(values) != t_len + 1 or len(dones) != t_len:
        raise ValueError("rewards/values/dones lengths do not chain")
    adv = np.zeros(t_len)
    acc = 0.0
    for t in range(t_len - 1, -1, -1):
        nonterminal = 1.0 - dones[t]
        delta = rewards[t] + gamma * values[t + 1] * nonterminal - values[t]
        acc = delta + gamma * lam * nonterminal * acc
        adv[t] = acc
    return adv, adv + values[:-1]


def gae_direct(rewards, values, dones, gamma, lam):
    """O(T^2) direct-summation reference for testing."""
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    t_len = len(rewards)
    deltas = np.array(
        [rewards[t] + gamma * values[t + 1] * (1 - dones[t]) - values[t] for t in range(t_len)]
    )
    adv = np.zeros(t_len)
    for t in range(t_len):
        coef = 1.0
        for k in range(t, t_len):
            adv[t] += coef * deltas[k]
            if dones[k]:
                break
            coef *= gamma * lam
    return adv, adv + values[:-1]


def normalize_advantages(adv: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    return (adv - adv.mean()) / (adv.std() + eps)


def ppo_update(
    batch: dict,
    policy: TeacherPolicy,
    value_net: ValueNet,
    optim: OptimState,
    config: PpoConfig,
    rng: np.random.Generator,
    lr: float | None = None,
) -> dict:
    """Clipped-surrogate update over the gathered batch.

    ``batch`` holds obs, actions, log-probs at collection time, normalized
    advantages, and returns. One Adam step per minibatch over the joint
    (policy + critic) parameter list. Returns a loss report; aborts (no
    parameter change) on non-finite loss.
    """
    obs = batch["obs"]
    actions = batch["actions"]
    logp_old = batch["logp"]
    adv = batch["advantages"]
    returns = batch["returns"]
    n = len(obs)
    lr = config.lr if lr is None else lr
    idx = np.arange(n)
    report = {"policy_loss": [], "value_loss": [], "ratio_max": [], "kl": [],
              "aborted": False, "lr": lr}
    params = policy.params() + value_net.params()
    for _ in range(config.epochs):
        rng.shuffle(idx)
        for mb in np.array_split(idx, config.minibatches):
            policy.zero_grads()
            value_net.zero_grads()
            logp_new = policy.log_prob(obs[mb], actions[mb])
            ratio = np.exp(logp_new - logp_old[mb])
            a = adv[mb]
            surr1 = ratio * a
            surr2 = np.clip(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps) * a
            pg_loss = -np.minimum(surr1, surr2).mean()
            v = value_net.forward(obs[mb])
            v_err = v - returns[mb]
            v_loss = config.critic_weight * np.mean(v_err**2)
            if not np.isfinite(pg_loss + v_loss):
                report["aborted"] = True
                return report
            log_ratio = logp_new - logp_old[mb]
            kl = float(np.mean(np.expm1(log_ratio) - log_ratio))
            if config.adaptive_lr:
                if kl > 2.0 * config.kl_target:
                    lr = max(config.lr_min, lr / 1.5)
                elif kl < 0.5 * config.kl_target:
                    lr = min(config.lr_max, lr * 1.5)
                report["lr"] = lr
            # d(pg_loss)/d(logp) is nonzero only where the unclipped branch is active
            active = (surr1 <= surr2).astype(np.float64)
            dlogp = -(a * ratio * active) / len(mb)
            policy.backward_log_prob(dlogp)
            value_net.backward(2.0 * config.critic_weight * v_err / len(mb))
            adam_step(params, policy.grads() + value_net.grads(), optim, lr)
            report["policy_loss"].append(float(pg_loss))
            report["value_loss"].append(float(v_loss))
            report["ratio_max"].append(float(np.abs(ratio - 1.0).max()))
            report["kl"].append(kl)
    return report
