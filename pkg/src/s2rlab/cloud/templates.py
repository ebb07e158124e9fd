"""Canonical boundary point templates per shape, centroid at the origin.

Template density defaults to 512 boundary samples per object shape (the
768-point scene budget must always be coverable without replacement) and
128 per gripper finger.
"""

from __future__ import annotations

import numpy as np

from ..world import shapes
from ..world.types import BodyPose

OBJECT_TEMPLATE_POINTS = 512
FINGER_TEMPLATE_POINTS = 128

_cache: dict[tuple[str, int], np.ndarray] = {}


def _box_boundary(hx: float, hy: float, k: int) -> np.ndarray:
    perim = 4.0 * (hx + hy)
    ts = (np.arange(k) + 0.5) / k * perim
    pts = np.zeros((k, 2))
    for i, t in enumerate(ts):
        if t < 2 * hx:
            pts[i] = (-hx + t, -hy)
        elif t < 2 * hx + 2 * hy:
            pts[i] = (hx, -hy + (t - 2 * hx))
        elif t < 4 * hx + 2 * hy:
            pts[i] = (hx - (t - 2 * hx - 2 * hy), hy)
        else:
            pts[i] = (-hx, hy - (t - 4 * hx - 2 * hy))
    return pts


def _disk_boundary(r: float, k: int) -> np.ndarray:
    ang = (np.arange(k) + 0.5) / k * 2.0 * np.pi
    return np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)


def shape_template(tag: str, k: int = OBJECT_TEMPLATE_POINTS) -> np.ndarray:
    """Boundary samples for a shape tag, shape (k, 2), centroid at origin."""
    key = (tag, k)
    if key in _cache:
        return _cache[key]
    sd = shapes.shape_def(tag)
    if tag == "disk_with_stem":
        # bulb analog: round head plus a rectangular stem reaching the grasp point
        k_head = (3 * k) // 4
        head = _disk_boundary(sd.radius, k_head) + np.array([0.02, 0.0])
        stem = _box_boundary(0.035, 0.008, k - k_head) + np.array([-0.045, 0.0])
        pts = np.concatenate([head, stem])
    elif sd.kind == "box":
        pts = _box_boundary(*sd.half_extents, k)
    else:
        pts = _disk_boundary(sd.radius, k)
    pts = pts - pts.mean(axis=0)
    _cache[key] = pts
    return pts


def finger_template(length: float, k: int = FINGER_TEMPLATE_POINTS) -> np.ndarray:
    """Points along one finger, local frame: finger root at origin, +x forward."""
    xs = (np.arange(k) + 0.5) / k * length
    side = np.where(np.arange(k) % 2 == 0, 0.004, -0.004)
    return np.stack([xs, side], axis=1)


def transform_template(template: np.ndarray, pose: BodyPose) -> np.ndarray:
    """Rigid planar transform: rotate by pose.theta, then translate."""
    c, s = np.cos(pose.theta), np.sin(pose.theta)
    rotm = np.array([[c, -s], [s, c]])
    return template @ rotm.T + pose.position
