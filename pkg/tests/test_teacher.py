import json

import numpy as np
import pytest

from s2rlab.learnkit import OptimState
from s2rlab.teacher import (
    HarvestError,
    PpoConfig,
    TeacherConfig,
    TeacherPolicy,
    ValueNet,
    compute_gae,
    gae_direct,
    harvest,
    normalize_advantages,
    ppo_update,
    privileged_dim,
    privileged_vector,
    train_teacher,
)
from s2rlab.hitl.experts import ScriptedExpert
from s2rlab.world import PlanarWorld


class TestGae:
    def test_single_terminal_step(self):
        adv, ret = compute_gae(np.array([1.0]), np.array([0.0, 0.0]), np.array([1.0]), 0.99, 0.95)
        np.testing.assert_allclose(adv, [1.0])
        np.testing.assert_allclose(ret, [1.0])

    def test_telescoping_with_unit_gamma_lambda(self):
        adv, _ = compute_gae(
            np.array([0.0, 1.0]), np.array([0.0, 0.0, 0.0]), np.zeros(2), 1.0, 1.0
        )
        np.testing.assert_allclose(adv, [1.0, 1.0])

    def test_matches_direct_summation_on_random_instances(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            t_len = int(rng.integers(2, 64))
            rewards = rng.normal(size=t_len)
            values = rng.normal(size=t_len + 1)
            dones = (rng.uniform(size=t_len) < 0.15).astype(float)
            adv1, ret1 = compute_gae(rewards, values, dones, 0.99, 0.95)
            adv2, ret2 = gae_direct(rewards, values, dones, 0.99, 0.95)
            np.testing.assert_allclose(adv1, adv2, atol=1e-12)
            np.testing.assert_allclose(ret1, ret2, atol=1e-12)

    def test_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            compute_gae(np.zeros(3), np.zeros(3), np.zeros(3), 0.99, 0.95)


def _make_nets(seed=0, obs_dim=4):
    rng = np.random.default_rng(seed)
    policy = TeacherPolicy.create(obs_dim, rng)
    value = ValueNet.create(obs_dim, rng)
    optim = OptimState.for_params(policy.params() + value.params())
    return policy, value, optim


def _batch(policy, value, rng, n=32, obs_dim=4, adv=None):
    obs = rng.normal(size=(n, obs_dim))
    actions, logp = policy.sample(obs, rng)
    if adv is None:
        adv = rng.normal(size=n)
    returns = rng.normal(size=n)
    return {"obs": obs, "actions": actions, "logp": logp, "advantages": adv, "returns": returns}


class TestPpoUpdate:
    def test_zero_advantages_leave_policy_unchanged_value_moves(self):
        policy, value, optim = _make_nets()
        rng = np.random.default_rng(1)
        batch = _batch(policy, value, rng, adv=np.zeros(32))
        p_before = [p.copy() for p in policy.params()]
        v_before = [p.copy() for p in value.params()]
        ppo_update(batch, policy, value, optim, PpoConfig(), np.random.default_rng(0))
        for a, b in zip(policy.params(), p_before):
            np.testing.assert_array_equal(a, b)
        moved = any(not np.array_equal(a, b) for a, b in zip(value.params(), v_before))
        assert moved

    def test_clip_definition(self):
        # rho = 1.5, eps = 0.2, A > 0 -> surrogate uses the clipped 1.2
        rho, eps, a = 1.5, 0.2, 2.0
        assert min(rho * a, np.clip(rho, 1 - eps, 1 + eps) * a) == pytest.approx(1.2 * a)

    def test_first_minibatch_ratio_is_exactly_one(self):
        policy, value, optim = _make_nets(2)
        rng = np.random.default_rng(3)
        batch = _batch(policy, value, rng)
        report = ppo_update(
            batch, policy, value, optim,
            PpoConfig(epochs=1, minibatches=1), np.random.default_rng(0),
        )
        assert report["ratio_max"][0] < 1e-12

    def test_single_sample_loss_matches_hand_computation(self):
        policy, value, optim = _make_nets(4)
        rng = np.random.default_rng(5)
        obs = rng.normal(size=(1, 4))
        action, logp = policy.sample(obs, rng)
        adv = np.array([0.7])
        ret = np.array([0.3])
        batch = {"obs": obs, "actions": action, "logp": logp, "advantages": adv, "returns": ret}
        v = value.forward(obs)
        expected_pg = -min(1.0 * 0.7, np.clip(1.0, 0.8, 1.2) * 0.7)
        expected_v = 4.0 * (v[0] - 0.3) ** 2
        report = ppo_update(
            batch, policy, value, optim,
            PpoConfig(epochs=1, minibatches=1), np.random.default_rng(0),
        )
        assert report["policy_loss"][0] == pytest.approx(expected_pg, abs=1e-10)
        assert report["value_loss"][0] == pytest.approx(expected_v, abs=1e-10)

    def test_nonfinite_loss_aborts_without_update(self):
        policy, value, optim = _make_nets(6)
        rng = np.random.default_rng(7)
        batch = _batch(policy, value, rng)
        batch["advantages"] = np.full(32, np.nan)
        p_before = [p.copy() for p in policy.params()]
        report = ppo_update(batch, policy, value, optim, PpoConfig(), np.random.default_rng(0))
        assert report["aborted"]
        for a, b in zip(policy.params(), p_before):
            np.testing.assert_array_equal(a, b)


class TestTraining:
    def test_zero_budget_returns_untrained_policy(self):
        cfg = TeacherConfig.for_task("reach_grasp", total_steps=0)
        res = train_teacher(cfg, seed=3)
        fresh = TeacherPolicy.create(
            privileged_dim("reach_grasp"),
            np.random.default_rng(np.random.SeedSequence([3, 0x9E37])),
        )
        for a, b in zip(res.policy.params(), fresh.params()):
            np.testing.assert_array_equal(a, b)
        assert res.curve == []

    def test_training_reproducible_bitwise(self):
        cfg = TeacherConfig.for_task("reach_grasp", total_steps=2048, n_envs=4, eval_every=2)
        r1 = train_teacher(cfg, seed=11)
        r2 = train_teacher(cfg, seed=11)
        m1 = json.dumps(r1.policy.to_modules(), sort_keys=True)
        m2 = json.dumps(r2.policy.to_modules(), sort_keys=True)
        assert m1 == m2
        assert r1.curve == r2.curve

    def test_privileged_vector_layout_is_stable(self):
        env = PlanarWorld("insert")
        state = env.reset(0).state
        vec = privileged_vector(state)
        assert vec.shape == (privileged_dim("insert"),)
        assert np.isfinite(vec).all()


class TestHarvest:
    def test_expert_harvest_counts_and_success(self):
        expert = ScriptedExpert("reach_grasp")
        trajs = harvest(expert, lambda: PlanarWorld("reach_grasp"), n_success=5, min_len=1, seed=0)
        assert len(trajs) == 5
        for tr in trajs:
            assert tr["length"] >= 1
            assert len(tr["steps"]) == tr["length"] + 1

    def test_min_len_filter(self):
        expert = ScriptedExpert("reach_grasp")
        with pytest.raises(HarvestError):
            harvest(
                expert, lambda: PlanarWorld("reach_grasp"),
                n_success=2, min_len=9999, seed=0, max_attempts=6,
            )

    def test_kept_trajectories_have_joint_records(self):
        expert = ScriptedExpert("insert")
        trajs = harvest(expert, lambda: PlanarWorld("insert"), n_success=2, min_len=1, seed=3)
        for tr in trajs:
            for step in tr["steps"]:
                assert len(step["q"]) == 3
                assert step["gripper_cmd"] in (0, 1)
