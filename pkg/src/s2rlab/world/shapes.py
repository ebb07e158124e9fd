"""Shape definitions, disk-vs-shape penetration, and grasp affordances.

Collision is limited to a moving disk (the gripper body) against boxes
and disks, plus axis-aligned wall clamping. Shapes are defined in their
own body frame with the centroid at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import BodyPose, wrap_angle


@dataclass(frozen=True)
class ShapeDef:
    tag: str
    kind: str  # "box" | "disk"
    half_extents: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.0
    graspable: bool = False
    grasp_offset: tuple[float, float] = (0.0, 0.0)
    # None: any approach heading grasps; float: heading must be orthogonal
    # to the body axis within this tolerance (radians)
    orthogonal_grasp_tol: float | None = None


SHAPES: dict[str, ShapeDef] = {
    "tabletop": ShapeDef("tabletop", "box", half_extents=(0.08, 0.08)),
    "rod": ShapeDef(
        "rod", "box", half_extents=(0.06, 0.012),
        graspable=True, orthogonal_grasp_tol=0.7,
    ),
    "peg": ShapeDef("peg", "disk", radius=0.03, graspable=True),
    "disk_with_stem": ShapeDef(
        "disk_with_stem", "disk", radius=0.035,
        graspable=True, grasp_offset=(-0.055, 0.0), orthogonal_grasp_tol=0.7,
    ),
    "socket_base": ShapeDef("socket_base", "box", half_extents=(0.05, 0.05)),
}


def shape_def(tag: str) -> ShapeDef:
    try:
        return SHAPES[tag]
    except KeyError:
        raise KeyError(f"unknown shape tag {tag!r}") from None


def grasp_point(tag: str, pose: BodyPose) -> np.ndarray:
    """World-frame point the gripper must reach to grasp this shape."""
    sd = shape_def(tag)
    off = np.asarray(sd.grasp_offset)
    c, s = np.cos(pose.theta), np.sin(pose.theta)
    return pose.position + np.array([c * off[0] - s * off[1], s * off[0] + c * off[1]])


def grasp_orientation_ok(tag: str, pose: BodyPose, ee_theta: float, ease: float = 1.0) -> bool:
    sd = shape_def(tag)
    if sd.orthogonal_grasp_tol is None:
        return True
    delta = wrap_angle(ee_theta - pose.theta)
    d_orth = min(abs(wrap_angle(delta - np.pi / 2)), abs(wrap_angle(delta + np.pi / 2)))
    return d_orth <= sd.orthogonal_grasp_tol * ease


def orthogonal_distance(tag: str, pose: BodyPose, ee_theta: float) -> float:
    """Angular distance to the nearest orthogonal approach, in [0, pi/2]."""
    sd = shape_def(tag)
    if sd.orthogonal_grasp_tol is None:
        return 0.0
    delta = wrap_angle(ee_theta - pose.theta)
    return min(abs(wrap_angle(delta - np.pi / 2)), abs(wrap_angle(delta + np.pi / 2)))


def disk_shape_penetration(
    center: np.ndarray,
    radius: float,
    tag: str,
    pose: BodyPose,
    motion: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Penetration depth and outward push normal (unit, from disk into shape).

    Returns (depth <= 0, zero normal) when separated. When the disk center
    sits inside a box and ``motion`` (the pusher's last displacement) is
    given, the exit face is the one the pusher is driving toward, so an
    attenuated push never flips direction mid-contact.
    """
    sd = shape_def(tag)
    if sd.kind == "disk":
        diff = pose.position - center
        dist = float(np.linalg.norm(diff))
        depth = radius + sd.radius - dist
        if depth <= 0.0:
            return depth, np.zeros(2)
        normal = diff / dist if dist > 1e-12 else np.array([1.0, 0.0])
        return depth, normal
    # box: work in the body frame
    hx, hy = sd.half_extents
    rel = center - pose.position
    c, s = np.cos(-pose.theta), np.sin(-pose.theta)
    local = np.array([c * rel[0] - s * rel[1], s * rel[0] + c * rel[1]])
    clamped = np.clip(local, [-hx, -hy], [hx, hy])
    faces = [np.array([1.0, 0]), np.array([-1.0, 0]), np.array([0, 1.0]), np.array([0, -1.0])]
    if not np.array_equal(clamped, local):
        # disk center outside the box
        gap = local - clamped
        dist = float(np.linalg.norm(gap))
        depth = radius - dist
        if depth <= 0.0:
            return depth, np.zeros(2)
        n_local = -gap / dist
    else:
        dists = np.array([hx - local[0], local[0] + hx, hy - local[1], local[1] + hy])
        face = int(np.argmin(dists))
        if motion is not None and float(np.linalg.norm(motion)) > 1e-9:
            m_local = np.array([c * motion[0] - s * motion[1], s * motion[0] + c * motion[1]])
            face = int(np.argmax([f @ m_local for f in faces]))
        n_local = faces[face]
        depth = radius + float(dists[face])
    cw, sw = np.cos(pose.theta), np.sin(pose.theta)
    normal = np.array([cw * n_local[0] - sw * n_local[1], sw * n_local[0] + cw * n_local[1]])
    return depth, normal


def box_corners(tag: str, pose: BodyPose) -> np.ndarray:
    sd = shape_def(tag)
    hx, hy = sd.half_extents
    local = np.array([[hx, hy], [hx, -hy], [-hx, -hy], [-hx, hy]])
    c, s = np.cos(pose.theta), np.sin(pose.theta)
    rotm = np.array([[c, -s], [s, c]])
    return local @ rotm.T + pose.position


def clamp_to_walls(tag: str, pose: BodyPose, front_wall_x: float, right_wall_y: float) -> BodyPose:
    """Shift a shape so it does not penetrate the front (max x) or right
    (min y) wall. Rotation is untouched."""
    sd = shape_def(tag)
    if sd.kind == "disk":
        max_x = pose.x + sd.radius
        min_y = pose.y - sd.radius
    else:
        corners = box_corners(tag, pose)
        max_x = float(corners[:, 0].max())
        min_y = float(corners[:, 1].min())
    dx = min(0.0, front_wall_x - max_x)
    dy = max(0.0, right_wall_y - min_y)
    if dx == 0.0 and dy == 0.0:
        return pose
    return BodyPose(pose.x + dx, pose.y + dy, pose.theta)


def wall_contact(
    tag: str, pose: BodyPose, front_wall_x: float, right_wall_y: float, tol: float
) -> tuple[bool, bool]:
    """(touching front wall, touching right wall) within tol."""
    sd = shape_def(tag)
    if sd.kind == "disk":
        max_x = pose.x + sd.radius
        min_y = pose.y - sd.radius
    else:
        corners = box_corners(tag, pose)
        max_x = float(corners[:, 0].max())
        min_y = float(corners[:, 1].min())
    return front_wall_x - max_x <= tol, min_y - right_wall_y <= tol
