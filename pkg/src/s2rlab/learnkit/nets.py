"""Dense networks with hand-written forward/backward passes.

Everything runs in float64 on numpy arrays. Each module caches what its
backward pass needs during forward, accumulates parameter gradients in
place, and exposes flat ``params()`` / ``grads()`` lists so a single Adam
state can drive arbitrary compositions of modules.
"""

from __future__ import annotations

import numpy as np

Array = np.ndarray

ACTIVATIONS = ("relu", "elu", "gelu", "tanh", "identity")

_GELU_C = np.sqrt(2.0 / np.pi)


def _act_forward(name: str, z: Array) -> Array:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "elu":
        return np.where(z > 0.0, z, np.expm1(np.minimum(z, 0.0)))
    if name == "gelu":
        u = _GELU_C * (z + 0.044715 * z**3)
        return 0.5 * z * (1.0 + np.tanh(u))
    if name == "tanh":
        return np.tanh(z)
    if name == "identity":
        return z
    raise ValueError(f"unknown activation {name!r}")


def _act_backward(name: str, z: Array, y: Array) -> Array:
    """d(activation)/dz given cached pre-activation z and output y."""
    if name == "relu":
        return (z > 0.0).astype(z.dtype)
    if name == "elu":
        return np.where(z > 0.0, 1.0, y + 1.0)
    if name == "gelu":
        u = _GELU_C * (z + 0.044715 * z**3)
        t = np.tanh(u)
        du = _GELU_C * (1.0 + 3 * 0.044715 * z**2)
        return 0.5 * (1.0 + t) + 0.5 * z * (1.0 - t**2) * du
    if name == "tanh":
        return 1.0 - y**2
    if name == "identity":
        return np.ones_like(z)
    raise ValueError(f"unknown activation {name!r}")


def _init_scale(act: str, fan_in: int) -> float:
    if act in ("relu", "elu", "gelu"):
        return float(np.sqrt(2.0 / fan_in))
    return float(np.sqrt(1.0 / fan_in))


class Dense:
    """One affine layer with a pointwise activation."""

    def __init__(self, w: Array, b: Array, act: str = "identity"):
        if act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {act!r}")
        self.w = np.asarray(w, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        if self.w.ndim != 2 or self.b.shape != (self.w.shape[0],):
            raise ValueError("weight/bias shapes do not chain")
        self.act = act
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x: Array | None = None
        self._z: Array | None = None
        self._y: Array | None = None

    @classmethod
    def create(cls, n_in: int, n_out: int, act: str, rng: np.random.Generator) -> "Dense":
        w = rng.normal(0.0, _init_scale(act, n_in), size=(n_out, n_in))
        return cls(w, np.zeros(n_out), act)

    @property
    def n_in(self) -> int:
        return self.w.shape[1]

    @property
    def n_out(self) -> int:
        return self.w.shape[0]

    def forward(self, x: Array) -> Array:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n_in:
            raise ValueError(f"input dim {x.shape[-1]} != layer dim {self.n_in}")
        z = x @ self.w.T + self.b
        y = _act_forward(self.act, z)
        self._x, self._z, self._y = x, z, y
        return y

    def backward(self, dy: Array) -> Array:
        if self._x is None:
            raise RuntimeError("backward before forward")
        dz = dy * _act_backward(self.act, self._z, self._y)
        flat_dz = dz.reshape(-1, self.n_out)
        flat_x = self._x.reshape(-1, self.n_in)
        self.gw += flat_dz.T @ flat_x
        self.gb += flat_dz.sum(axis=0)
        return dz @ self.w

    def params(self) -> list[Array]:
        return [self.w, self.b]

    def grads(self) -> list[Array]:
        return [self.gw, self.gb]

    def zero_grads(self) -> None:
        self.gw[:] = 0.0
        self.gb[:] = 0.0


class DenseNet:
    """Stack of Dense layers; dimensions of consecutive layers must chain."""

    def __init__(self, layers: list[Dense]):
        for a, b in zip(layers, layers[1:]):
            if a.n_out != b.n_in:
                raise ValueError("layer dimensions do not chain")
        self.layers = layers

    @classmethod
    def create(
        cls,
        dims: list[int],
        hidden_act: str,
        rng: np.random.Generator,
        out_act: str = "identity",
    ) -> "DenseNet":
        layers = []
        for i in range(len(dims) - 1):
            act = hidden_act if i < len(dims) - 2 else out_act
            layers.append(Dense.create(dims[i], dims[i + 1], act, rng))
        return cls(layers)

    @property
    def n_in(self) -> int:
        return self.layers[0].n_in

    @property
    def n_out(self) -> int:
        return self.layers[-1].n_out

    def forward(self, x: Array) -> Array:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dy: Array) -> Array:
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy

    def params(self) -> list[Array]:
        return [p for l in self.layers for p in l.params()]

    def grads(self) -> list[Array]:
        return [g for l in self.layers for g in l.grads()]

    def zero_grads(self) -> None:
        for l in self.layers:
            l.zero_grads()

    def dims(self) -> list[int]:
        return [self.n_in] + [l.n_out for l in self.layers]

    def activations(self) -> list[str]:
        return [l.act for l in self.layers]


class LabelEmbedding:
    """Lookup table mapping integer labels to learned vectors."""

    def __init__(self, table: Array):
        self.table = np.asarray(table, dtype=np.float64)
        self.gtable = np.zeros_like(self.table)
        self._labels: Array | None = None

    @classmethod
    def create(cls, n_labels: int, dim: int, rng: np.random.Generator) -> "LabelEmbedding":
        return cls(rng.normal(0.0, 0.1, size=(n_labels, dim)))

    @property
    def dim(self) -> int:
        return self.table.shape[1]

    def forward(self, labels: Array) -> Array:
        labels = np.asarray(labels, dtype=np.int64)
        self._labels = labels
        return self.table[labels]

    def backward(self, dy: Array) -> None:
        np.add.at(self.gtable, self._labels, dy)

    def params(self) -> list[Array]:
        return [self.table]

    def grads(self) -> list[Array]:
        return [self.gtable]

    def zero_grads(self) -> None:
        self.gtable[:] = 0.0


class PointEncoder:
    """Per-point MLP followed by channel-wise max pooling over the cloud.

    Input is (B, N, d); output is (B, F). The pooling argmax is cached so
    the backward pass routes each channel's gradient to the point that won
    the max.
    """

    def __init__(self, mlp: DenseNet):
        self.mlp = mlp
        self._shape: tuple[int, int] | None = None
        self._argmax: Array | None = None

    @classmethod
    def create(
        cls, in_dim: int, hidden: list[int], out_dim: int, act: str, rng: np.random.Generator
    ) -> "PointEncoder":
        # activation applied on the output layer too: pooled features stay bounded below by the activation floor
        net = DenseNet.create([in_dim] + hidden + [out_dim], act, rng, out_act=act)
        return cls(net)

    @property
    def out_dim(self) -> int:
        return self.mlp.n_out

    def forward(self, points: Array) -> Array:
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 3:
            raise ValueError("expected (batch, points, features)")
        b, n, d = points.shape
        feats = self.mlp.forward(points.reshape(b * n, d)).reshape(b, n, -1)
        self._shape = (b, n)
        self._argmax = feats.argmax(axis=1)
        return np.take_along_axis(feats, self._argmax[:, None, :], axis=1)[:, 0, :]

    def backward(self, dy: Array) -> Array:
        b, n = self._shape
        f = self.mlp.n_out
        dfeats = np.zeros((b, n, f))
        np.put_along_axis(dfeats, self._argmax[:, None, :], dy[:, None, :], axis=1)
        dpoints = self.mlp.backward(dfeats.reshape(b * n, f))
        return dpoints.reshape(b, n, -1)

    def params(self) -> list[Array]:
        return self.mlp.params()

    def grads(self) -> list[Array]:
        return self.mlp.grads()

    def zero_grads(self) -> None:
        self.mlp.zero_grads()
