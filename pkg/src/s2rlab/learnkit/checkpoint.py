"""JSON checkpoint serialization for networks and composite policies.

A checkpoint is a JSON object ``{kind, meta, modules, optimizer?}`` where
each module entry is either a dense net (dims + activations + flat
row-major parameter arrays) or a bare array. Hashing the canonical JSON
gives a stable fingerprint used by the non-forgetting audit.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .nets import Array, Dense, DenseNet
from .optim import OptimState


def net_to_json(net: DenseNet) -> dict:
    return {
        "type": "dense_net",
        "dims": net.dims(),
        "activations": net.activations(),
        "params": [p.reshape(-1).tolist() for p in net.params()],
    }


def net_from_json(d: dict) -> DenseNet:
    dims = d["dims"]
    acts = d["activations"]
    flat = d["params"]
    layers = []
    for i in range(len(dims) - 1):
        w = np.asarray(flat[2 * i], dtype=np.float64).reshape(dims[i + 1], dims[i])
        b = np.asarray(flat[2 * i + 1], dtype=np.float64)
        layers.append(Dense(w, b, acts[i]))
    return DenseNet(layers)


def array_to_json(a: Array) -> dict:
    a = np.asarray(a, dtype=np.float64)
    return {"type": "array", "shape": list(a.shape), "data": a.reshape(-1).tolist()}


def array_from_json(d: dict) -> Array:
    return np.asarray(d["data"], dtype=np.float64).reshape(d["shape"])


def optim_to_json(state: OptimState) -> dict:
    return {
        "step": state.step,
        "beta1": state.beta1,
        "beta2": state.beta2,
        "eps": state.eps,
        "m": [x.reshape(-1).tolist() for x in state.m],
        "v": [x.reshape(-1).tolist() for x in state.v],
        "shapes": [list(x.shape) for x in state.m],
    }


def optim_from_json(d: dict) -> OptimState:
    shapes = d["shapes"]
    return OptimState(
        m=[np.asarray(x, dtype=np.float64).reshape(s) for x, s in zip(d["m"], shapes)],
        v=[np.asarray(x, dtype=np.float64).reshape(s) for x, s in zip(d["v"], shapes)],
        step=d["step"],
        beta1=d["beta1"],
        beta2=d["beta2"],
        eps=d["eps"],
    )


def save_checkpoint(
    path: str | Path,
    kind: str,
    modules: dict,
    meta: dict | None = None,
    optimizer: OptimState | None = None,
) -> None:
    doc = {"kind": kind, "meta": meta or {}, "modules": modules}
    if optimizer is not None:
        doc["optimizer"] = optim_to_json(optimizer)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc))


def load_checkpoint(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text())
    if "kind" not in doc or "modules" not in doc:
        raise ValueError(f"{path}: not a checkpoint file")
    return doc


def checkpoint_hash(doc_or_path: dict | str | Path) -> str:
    """SHA-256 of the canonical JSON encoding (optimizer state excluded)."""
    doc = doc_or_path if isinstance(doc_or_path, dict) else load_checkpoint(doc_or_path)
    trimmed = {k: v for k, v in doc.items() if k != "optimizer"}
    blob = json.dumps(trimmed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
