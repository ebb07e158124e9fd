import numpy as np
import pytest

from s2rlab.cloud import LabeledPointCloud, PairedCloudSet
from s2rlab.distill import (
    ConfigError,
    DistillConfig,
    StudentConfig,
    StudentPolicy,
    evaluate,
    read_rows,
    regularizer_value,
    rows_from_trajectories,
    stack_rows,
    student_loss,
    train_student,
    write_rows,
)
from s2rlab.learnkit import LrSchedule, finite_diff_grad, relative_error
from s2rlab.world import PlanarWorld

TINY = StudentConfig(
    cloud_budget=16, label_embed_dim=4, point_hidden=(16,), point_out=16,
    proprio_hidden=(16,), proprio_out=16, fusion_hidden=(32,), fusion_out=32,
    gmm_modes=2, gmm_hidden=(32,),
)


def _rng_batch(rng, b=4, n=16):
    points = rng.normal(size=(b, n, 2))
    labels = rng.integers(0, 2, (b, n))
    proprio = rng.normal(size=(b, 14))
    tq = rng.normal(size=(b, 3)) * 0.5
    tg = rng.integers(0, 2, b).astype(float)
    return points, labels, proprio, tq, tg


def _paired(rng, k=4, n=16, identical=False):
    sim = [LabeledPointCloud(rng.normal(size=(n, 2)), rng.integers(0, 2, n)) for _ in range(k)]
    real = [c.clone() for c in sim] if identical else [
        LabeledPointCloud(c.points + rng.normal(0, 0.01, size=(n, 2)), c.labels.copy())
        for c in sim
    ]
    return PairedCloudSet(sim, real)


class TestStudentLoss:
    def test_beta_zero_is_pure_bc(self):
        rng = np.random.default_rng(0)
        policy = StudentPolicy.create(TINY, rng)
        batch = _rng_batch(rng)
        policy.zero_grads()
        report = student_loss(policy, batch, None, None, beta=0.0)
        assert report["reg"] == 0.0
        assert report["total"] == pytest.approx(report["nll"] + report["bce"])

    def test_identical_paired_clouds_zero_regularizer(self):
        rng = np.random.default_rng(1)
        policy = StudentPolicy.create(TINY, rng)
        paired = _paired(rng, identical=True)
        batch = _rng_batch(rng)
        policy.zero_grads()
        report = student_loss(policy, batch, paired, np.arange(4), beta=1e-3)
        assert report["reg"] == 0.0

    def test_regularizer_nonnegative_and_positive_when_different(self):
        rng = np.random.default_rng(2)
        policy = StudentPolicy.create(TINY, rng)
        paired = _paired(rng, identical=False)
        assert regularizer_value(policy, paired, 1e-3) > 0.0

    def test_default_beta_is_1e_minus_3(self):
        assert DistillConfig().beta == 1e-3

    def test_beta_without_paired_set_is_config_error(self):
        rng = np.random.default_rng(3)
        policy = StudentPolicy.create(TINY, rng)
        with pytest.raises(ConfigError):
            student_loss(policy, _rng_batch(rng), None, None, beta=1e-3)

    def test_bc_gradients_match_finite_differences_on_subset(self):
        rng = np.random.default_rng(4)
        policy = StudentPolicy.create(TINY, rng)
        batch = _rng_batch(rng, b=2)

        def loss():
            pts, lbl, pro, tq, tg = batch
            fused = policy.features(pts, lbl, pro)
            nll = policy.gmm.nll(fused, tq)
            from s2rlab.learnkit import bce_loss

            logits = policy.grip_head.forward(fused)[:, 0]
            bce, _ = bce_loss(logits, tg)
            return float(nll.mean() + bce.mean())

        policy.zero_grads()
        policy.bc_loss(*batch)
        analytic = policy.grads()
        params = policy.params()
        rng_pick = np.random.default_rng(0)
        worst = 0.0
        for arr_idx in rng_pick.choice(len(params), size=6, replace=False):
            p = params[arr_idx]
            flat = p.reshape(-1)
            a_flat = analytic[arr_idx].reshape(-1)
            for el in rng_pick.choice(flat.size, size=min(4, flat.size), replace=False):
                orig = flat[el]
                flat[el] = orig + 1e-6
                up = loss()
                flat[el] = orig - 1e-6
                down = loss()
                flat[el] = orig
                numeric = (up - down) / 2e-6
                denom = max(abs(numeric), abs(a_flat[el]), 1e-8)
                worst = max(worst, abs(numeric - a_flat[el]) / denom)
        assert worst < 1e-4

    def test_regularizer_gradients_match_finite_differences(self):
        rng = np.random.default_rng(5)
        policy = StudentPolicy.create(TINY, rng)
        paired = _paired(rng, k=3)
        sp = np.stack([c.points for c in paired.sim])
        sl = np.stack([c.labels for c in paired.sim])
        rp = np.stack([c.points for c in paired.real])
        rl = np.stack([c.labels for c in paired.real])

        def loss():
            phi_s = policy.encode_cloud(sp, sl)
            phi_r = policy.encode_cloud(rp, rl)
            return float(1e-2 * np.mean(np.sum((phi_r - phi_s) ** 2, -1)))

        policy.zero_grads()
        policy.paired_regularizer(sp, sl, rp, rl, beta=1e-2)
        analytic = policy.point_enc.grads() + policy.label_embed.grads()
        params = policy.point_enc.params() + policy.label_embed.params()
        worst = 0.0
        rng_pick = np.random.default_rng(1)
        for arr_idx in range(len(params)):
            flat = params[arr_idx].reshape(-1)
            a_flat = analytic[arr_idx].reshape(-1)
            for el in rng_pick.choice(flat.size, size=min(3, flat.size), replace=False):
                orig = flat[el]
                flat[el] = orig + 1e-6
                up = loss()
                flat[el] = orig - 1e-6
                down = loss()
                flat[el] = orig
                numeric = (up - down) / 2e-6
                denom = max(abs(numeric), abs(a_flat[el]), 1e-8)
                worst = max(worst, abs(numeric - a_flat[el]) / denom)
        assert worst < 1e-4


def _toy_rows(rng, n_rows=24, n_pts=16):
    """Learnable mapping: targets depend linearly on proprio."""
    rows = []
    for _ in range(n_rows):
        pts = rng.normal(size=(n_pts, 2))
        labels = rng.integers(0, 2, n_pts)
        proprio = rng.normal(size=14)
        tq = 0.3 * proprio[:3]
        rows.append(
            {
                "cloud": LabeledPointCloud(pts, labels).to_flat(),
                "proprio": proprio.tolist(),
                "target_q": tq.tolist(),
                "target_grip": int(proprio[0] > 0),
            }
        )
    return rows


class TestTraining:
    def test_zero_steps_returns_initialized_policy(self):
        rng = np.random.default_rng(6)
        rows = _toy_rows(rng)
        cfg = DistillConfig(steps=0, beta=0.0, augment_data=False)
        res = train_student(rows, None, TINY, cfg, None, seed=1)
        fresh = StudentPolicy.create(
            TINY, np.random.default_rng(np.random.SeedSequence([1, 0xD157]))
        )
        for a, b in zip(res.policy.params(), fresh.params()):
            np.testing.assert_array_equal(a, b)

    def test_loss_decreases_on_learnable_data(self):
        rng = np.random.default_rng(7)
        rows = _toy_rows(rng)
        cfg = DistillConfig(
            steps=120, batch_size=8, beta=0.0, augment_data=False,
            schedule=LrSchedule(base_lr=3e-4, warmup_steps=10, cosine_decay_steps=100_000),
        )
        res = train_student(rows, None, TINY, cfg, None, seed=2)
        first = np.mean([l["total"] for l in res.losses[:10]])
        last = np.mean([l["total"] for l in res.losses[-10:]])
        assert last < first

    def test_empty_dataset_raises(self):
        with pytest.raises(ConfigError):
            train_student([], None, TINY, DistillConfig(steps=1), None)

    def test_regularizer_shrinks_with_training(self):
        rng = np.random.default_rng(8)
        rows = _toy_rows(rng)
        paired = _paired(rng, k=6)
        cfg = DistillConfig(
            steps=150, batch_size=8, beta=1e-2, paired_batch=4, augment_data=False,
            schedule=LrSchedule(base_lr=3e-4, warmup_steps=10, cosine_decay_steps=100_000),
        )
        res = train_student(rows, paired, TINY, cfg, None, seed=3)
        assert res.reg_first is not None and res.reg_last is not None
        assert res.reg_last < res.reg_first


class TestEvaluate:
    def test_empty_seed_list_is_error(self):
        rng = np.random.default_rng(9)
        policy = StudentPolicy.create(StudentConfig(cloud_budget=128), rng)
        with pytest.raises(ValueError):
            evaluate(policy, PlanarWorld("reach_grasp", cloud_budget=128), seed_list=[])

    def test_repeated_evaluation_identical(self):
        rng = np.random.default_rng(10)
        policy = StudentPolicy.create(StudentConfig(cloud_budget=128), rng)
        env = PlanarWorld("reach_grasp", cloud_budget=128)
        r1 = evaluate(policy, env, seed_list=range(3))
        r2 = evaluate(policy, env, seed_list=range(3))
        assert r1 == r2

    def test_student_action_is_markovian_in_observation(self):
        rng = np.random.default_rng(11)
        policy = StudentPolicy.create(StudentConfig(cloud_budget=128), rng)
        env = PlanarWorld("screw", cloud_budget=128)
        obs_a = env.reset(0)
        obs_b = env.reset(1)
        a1 = policy(obs_a)
        b1 = policy(obs_b)
        b2 = policy(obs_b)
        a2 = policy(obs_a)
        np.testing.assert_array_equal(a1.q, a2.q)
        np.testing.assert_array_equal(b1.q, b2.q)
        assert a1.gripper == a2.gripper


class TestDataset:
    def test_rows_round_trip_through_jsonl(self, tmp_path):
        rng = np.random.default_rng(12)
        rows = _toy_rows(rng, n_rows=5)
        path = tmp_path / "rows.jsonl"
        write_rows(path, rows)
        back = read_rows(path)
        assert back == rows

    def test_rows_from_harvested_trajectories(self):
        from s2rlab.hitl.experts import ScriptedExpert
        from s2rlab.teacher import harvest

        expert = ScriptedExpert("insert")
        trajs = harvest(expert, lambda: PlanarWorld("insert"), n_success=2, min_len=2, seed=0)
        rows = rows_from_trajectories(trajs, cloud_budget=64)
        assert len(rows) == sum(t["length"] for t in trajs)
        pts, labels, pro, tq, tg = stack_rows(rows, np.arange(len(rows)))
        assert pts.shape[1] == 64
        assert np.isfinite(tq).all()

    def test_checkpoint_round_trip(self, tmp_path):
        from s2rlab.distill import load_student, save_student

        rng = np.random.default_rng(13)
        policy = StudentPolicy.create(TINY, rng)
        save_student(tmp_path / "s.json", policy, {"task": "screw"})
        clone, meta = load_student(tmp_path / "s.json")
        assert meta["task"] == "screw"
        batch = _rng_batch(rng, b=2)
        f1 = policy.features(batch[0], batch[1], batch[2])
        f2 = clone.features(batch[0], batch[1], batch[2])
        np.testing.assert_array_equal(f1, f2)
