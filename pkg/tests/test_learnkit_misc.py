import numpy as np
import pytest

from s2rlab.learnkit import (
    DenseNet,
    LrSchedule,
    OptimState,
    adam_step,
    bce_loss,
    finite_diff_grad,
    lr_at,
    net_from_json,
    net_to_json,
    relative_error,
    sigmoid,
)


class TestBce:
    def test_logit_zero_label_one_is_log_two(self):
        loss, _ = bce_loss(np.array(0.0), np.array(1.0))
        assert loss == pytest.approx(np.log(2.0), abs=1e-12)

    def test_saturated_logit_no_overflow(self):
        loss, _ = bce_loss(np.array(30.0), np.array(1.0))
        assert 0.0 <= loss < 1e-12

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            z = np.array(rng.normal(scale=3.0))
            y = np.array(float(rng.integers(0, 2)))
            _, grad = bce_loss(z, y)

            def loss():
                return float(bce_loss(z, y)[0])

            numeric = finite_diff_grad(loss, [z], h=1e-6)
            assert relative_error([np.atleast_1d(grad)], [np.atleast_1d(numeric[0])]) < 1e-6

    def test_gradient_formula(self):
        z, y = np.array(1.3), np.array(0.0)
        _, grad = bce_loss(z, y)
        assert grad == pytest.approx(sigmoid(np.array(1.3)) - 0.0, abs=1e-15)


class TestAdam:
    def test_zero_gradient_leaves_params_unchanged(self):
        p = [np.array([1.0, -2.0])]
        state = OptimState.for_params(p)
        adam_step(p, [np.zeros(2)], state, lr=0.1)
        np.testing.assert_array_equal(p[0], [1.0, -2.0])
        assert state.step == 1

    def test_first_step_is_minus_lr_times_sign(self):
        p = [np.array([0.0])]
        state = OptimState.for_params(p)
        adam_step(p, [np.array([1.0])], state, lr=0.001)
        assert p[0][0] == pytest.approx(-0.001, rel=1e-6)

    def test_trajectory_matches_scalar_reference(self):
        # quadratic f(x) = 0.5 x^2, grad = x; independent scalar re-implementation
        p = [np.array([2.0])]
        state = OptimState.for_params(p)
        x_ref, m_ref, v_ref = 2.0, 0.0, 0.0
        b1, b2, eps, lr = 0.9, 0.999, 1e-8, 0.05
        for t in range(1, 101):
            g = x_ref
            m_ref = b1 * m_ref + (1 - b1) * g
            v_ref = b2 * v_ref + (1 - b2) * g * g
            x_ref -= lr * (m_ref / (1 - b1**t)) / (np.sqrt(v_ref / (1 - b2**t)) + eps)
            adam_step(p, [p[0].copy()], state, lr=lr)
        assert p[0][0] == pytest.approx(x_ref, abs=1e-10)

    def test_shape_mismatch_raises(self):
        p = [np.zeros(2)]
        state = OptimState.for_params(p)
        with pytest.raises(ValueError):
            adam_step(p, [np.zeros(3)], state, lr=0.1)


class TestLrSchedule:
    def test_warmup_endpoint_hits_base_lr(self):
        s = LrSchedule(base_lr=1e-4, warmup_steps=1000, cosine_decay_steps=100_000, min_lr=1e-6)
        assert lr_at(s, 1000) == pytest.approx(1e-4)

    def test_step_zero_is_zero(self):
        s = LrSchedule()
        assert lr_at(s, 0) == 0.0

    def test_decay_endpoint_is_min_lr(self):
        s = LrSchedule(base_lr=1e-4, warmup_steps=1000, cosine_decay_steps=100_000, min_lr=1e-6)
        assert lr_at(s, 101_000) == pytest.approx(1e-6)
        assert lr_at(s, 500_000) == pytest.approx(1e-6)

    def test_continuity_at_warmup_boundary(self):
        s = LrSchedule(base_lr=1e-4, warmup_steps=1000, cosine_decay_steps=100_000, min_lr=1e-6)
        gap = abs(lr_at(s, 1000) - lr_at(s, 1001))
        assert gap < s.base_lr * np.pi / s.cosine_decay_steps + 1e-12

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ValueError):
            LrSchedule(base_lr=1e-5, min_lr=1e-4)


class TestFiniteDiff:
    def test_quadratic_derivative(self):
        theta = np.array([3.0])

        def loss():
            return float(theta[0] ** 2)

        (g,) = finite_diff_grad(loss, [theta])
        assert g[0] == pytest.approx(6.0, rel=1e-6)

    def test_constant_function_gives_zero(self):
        theta = np.array([1.0, 2.0])
        (g,) = finite_diff_grad(lambda: 5.0, [theta])
        np.testing.assert_array_equal(g, [0.0, 0.0])


def test_dense_net_checkpoint_round_trip():
    rng = np.random.default_rng(0)
    net = DenseNet.create([3, 5, 2], "elu", rng)
    clone = net_from_json(net_to_json(net))
    x = rng.normal(size=3)
    np.testing.assert_array_equal(net.forward(x), clone.forward(x))
    assert clone.activations() == net.activations()
