import numpy as np
import pytest

from s2rlab.learnkit import (
    Dense,
    DenseNet,
    LabelEmbedding,
    PointEncoder,
    finite_diff_grad,
    relative_error,
)


def test_identity_single_layer_is_identity_map():
    net = DenseNet([Dense(np.eye(2), np.zeros(2), "identity")])
    out = net.forward(np.array([1.0, 2.0]))
    np.testing.assert_array_equal(out, [1.0, 2.0])


def test_relu_layer_clips_negative():
    net = DenseNet([Dense(np.eye(2), np.zeros(2), "relu")])
    out = net.forward(np.array([-1.0, 2.0]))
    np.testing.assert_array_equal(out, [0.0, 2.0])


def test_dimension_mismatch_raises():
    net = DenseNet([Dense(np.eye(2), np.zeros(2), "relu")])
    with pytest.raises(ValueError):
        net.forward(np.zeros(3))


def _manual_two_layer(w0, b0, w1, b1, x):
    # straight-line scalar re-evaluation, no shared code with DenseNet
    h = []
    for r in range(w0.shape[0]):
        z = b0[r]
        for c in range(w0.shape[1]):
            z += w0[r, c] * x[c]
        h.append(z if z > 0 else 0.0)
    y = []
    for r in range(w1.shape[0]):
        z = b1[r]
        for c in range(w1.shape[1]):
            z += w1[r, c] * h[c]
        y.append(np.tanh(z))
    return np.array(y)


def test_two_layer_forward_matches_scalar_reimplementation():
    rng = np.random.default_rng(0)
    w0 = rng.normal(size=(5, 3))
    b0 = rng.normal(size=5)
    w1 = rng.normal(size=(2, 5))
    b1 = rng.normal(size=2)
    net = DenseNet([Dense(w0, b0, "relu"), Dense(w1, b1, "tanh")])
    x = rng.normal(size=3)
    np.testing.assert_allclose(net.forward(x), _manual_two_layer(w0, b0, w1, b1, x), atol=1e-12)


@pytest.mark.parametrize("act", ["relu", "elu", "gelu", "tanh", "identity"])
def test_mlp_gradients_match_finite_differences(act):
    rng = np.random.default_rng(hash(act) % 2**32)
    net = DenseNet.create([4, 6, 3], act, rng, out_act="identity")
    x = rng.normal(size=4)
    target = rng.normal(size=3)

    def loss():
        y = net.forward(x)
        return float(0.5 * np.sum((y - target) ** 2))

    net.zero_grads()
    y = net.forward(x)
    net.backward(y - target)
    numeric = finite_diff_grad(loss, net.params())
    assert relative_error(net.grads(), numeric) < 1e-6


def test_mlp_input_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    net = DenseNet.create([3, 8, 2], "gelu", rng)
    x = rng.normal(size=3)
    target = rng.normal(size=2)

    net.zero_grads()
    y = net.forward(x)
    dx = net.backward(y - target)

    def loss():
        return float(0.5 * np.sum((net.forward(x) - target) ** 2))

    numeric = finite_diff_grad(loss, [x])
    assert relative_error([dx], numeric) < 1e-6


def test_point_encoder_max_pool_routing():
    rng = np.random.default_rng(1)
    enc = PointEncoder.create(3, [8], 4, "gelu", rng)
    pts = rng.normal(size=(2, 5, 3))
    target = rng.normal(size=(2, 4))

    def loss():
        y = enc.forward(pts)
        return float(0.5 * np.sum((y - target) ** 2))

    enc.zero_grads()
    y = enc.forward(pts)
    enc.backward(y - target)
    numeric = finite_diff_grad(loss, enc.params())
    assert relative_error(enc.grads(), numeric) < 1e-6


def test_label_embedding_accumulates_per_label():
    rng = np.random.default_rng(2)
    emb = LabelEmbedding.create(2, 3, rng)
    labels = np.array([0, 1, 1, 0])
    out = emb.forward(labels)
    assert out.shape == (4, 3)
    emb.zero_grads()
    dy = np.ones((4, 3))
    emb.backward(dy)
    np.testing.assert_allclose(emb.grads()[0], np.full((2, 3), 2.0))


def test_batched_forward_matches_loop():
    rng = np.random.default_rng(3)
    net = DenseNet.create([4, 5, 2], "elu", rng)
    xs = rng.normal(size=(6, 4))
    batched = net.forward(xs)
    per_row = np.stack([net.forward(x) for x in xs])
    np.testing.assert_allclose(batched, per_row, atol=1e-12)
