import numpy as np
import pytest

from s2rlab.learnkit import GmmHead, finite_diff_grad, relative_error


def _head(rng, feature_dim=3, action_dim=2, modes=3, bounds=(-5.0, 2.0)):
    return GmmHead.create(feature_dim, action_dim, modes, [8], "tanh", rng, bounds)


def test_single_mode_at_mean_gives_gaussian_constant():
    # one mode, mu == action, sigma == 1  ->  NLL = (k/2) log(2 pi)
    rng = np.random.default_rng(0)
    head = _head(rng, modes=1, action_dim=2)
    feats = rng.normal(size=3)
    raw = head.trunk.forward(feats)
    # force the trunk output: logits irrelevant, means = action, log-std = 0
    last = head.trunk.layers[-1]
    last.b -= raw  # zero the raw output
    action = np.array([0.7, -0.3])
    last.b[1:3] += action
    nll = head.nll(feats, action)
    assert nll.shape == (1,)
    assert nll[0] == pytest.approx(np.log(2 * np.pi), abs=1e-12)


def test_degenerate_mixture_reduces_to_single_mode():
    rng = np.random.default_rng(1)
    head = _head(rng, modes=3, action_dim=2)
    feats = rng.normal(size=3)
    action = rng.normal(size=2)
    # push one logit far up so its softmax weight is ~1
    w, means, stds = head.distribution(feats)
    raw = head.trunk.forward(feats)
    last = head.trunk.layers[-1]
    bump = np.zeros_like(last.b)
    bump[0] = 50.0
    last.b += bump
    nll = head.nll(feats, action)[0]
    z = (action - means[0]) / stds[0]
    single = 0.5 * np.sum(z**2) + np.sum(np.log(stds[0])) + np.log(2 * np.pi)
    assert nll == pytest.approx(single, rel=1e-9)


def test_mixture_weights_sum_to_one():
    rng = np.random.default_rng(2)
    for _ in range(50):
        head = _head(rng, modes=int(rng.integers(1, 6)))
        w, _, _ = head.distribution(rng.normal(size=3))
        assert abs(w.sum() - 1.0) < 1e-9


def test_nll_gradients_match_finite_differences():
    rng = np.random.default_rng(3)
    head = _head(rng, feature_dim=4, action_dim=4, modes=3)
    feats = rng.normal(size=4)
    action = rng.normal(size=4)

    def loss():
        return float(head.nll(feats, action)[0])

    head.zero_grads()
    head.nll(feats, action)
    head.backward_nll(np.array([1.0]))
    numeric = finite_diff_grad(loss, head.params())
    assert relative_error(head.grads(), numeric) < 1e-4


def test_feature_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    head = _head(rng, feature_dim=3, action_dim=2, modes=2)
    feats = rng.normal(size=3)
    action = rng.normal(size=2)
    head.zero_grads()
    head.nll(feats, action)
    dfeats = head.backward_nll(np.array([1.0]))[0]

    def loss():
        return float(head.nll(feats, action)[0])

    numeric = finite_diff_grad(loss, [feats])
    assert relative_error([dfeats], numeric) < 1e-4


def test_zero_variance_sample_returns_mean_exactly():
    rng = np.random.default_rng(5)
    # clamp range wide open and raw log-std pushed to exp() underflow
    head = _head(rng, modes=1, action_dim=2, bounds=(-2000.0, 2.0))
    last = head.trunk.layers[-1]
    raw = head.trunk.forward(np.zeros(3))
    last.b -= raw
    last.b[1:3] += np.array([0.4, -0.2])
    last.b[3:5] -= 1500.0  # log-std -> exp underflows to exactly 0
    sample = head.sample(np.zeros(3), np.random.default_rng(0))
    np.testing.assert_array_equal(sample, [0.4, -0.2])


def test_sampling_is_deterministic_given_rng_state():
    rng = np.random.default_rng(6)
    head = _head(rng)
    feats = rng.normal(size=3)
    s1 = head.sample(feats, np.random.default_rng(42))
    s2 = head.sample(feats, np.random.default_rng(42))
    np.testing.assert_array_equal(s1, s2)


def test_mode_frequencies_match_softmax_weights():
    rng = np.random.default_rng(7)
    head = _head(rng, modes=2, action_dim=1)
    # separate the two modes so samples are attributable
    last = head.trunk.layers[-1]
    raw = head.trunk.forward(np.zeros(3))
    last.b -= raw
    last.b[0] = 0.8  # logits (0.8, 0)
    last.b[2] = -10.0  # means -10 and ...
    last.b[3] = 10.0  # ... +10
    last.b[4:6] = -3.0  # tight stds
    w, _, _ = head.distribution(np.zeros(3))
    draw = np.random.default_rng(123)
    n = 100_000
    hits = sum(1 for _ in range(n) if head.sample(np.zeros(3), draw)[0] < 0)
    assert abs(hits / n - w[0]) < 0.01


def test_mode_action_picks_heaviest_mode_mean():
    rng = np.random.default_rng(8)
    head = _head(rng, modes=3, action_dim=2)
    feats = rng.normal(size=3)
    w, means, _ = head.distribution(feats)
    np.testing.assert_array_equal(head.mode_action(feats), means[int(np.argmax(w))])
