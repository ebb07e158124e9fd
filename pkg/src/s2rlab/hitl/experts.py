"""Scripted privileged experts, one per task.

Each expert is a deterministic closed-loop policy over the true world
state, emitting task-space deltas. They back the oracle operator's
corrections, full-teleop demonstration collection, and solvability checks.
"""

from __future__ import annotations

import numpy as np

from ..world import shapes, tasks
from ..world.kinematics import ee_pose, heading_feasible
from ..world.types import TaskSpaceAction, WorldState, wrap_angle


def _clamp(v: float, bound: float) -> float:
    return float(np.clip(v, -bound, bound))


class ScriptedExpert:
    """Dispatch wrapper; progress() gives a scalar the oracle can monitor."""

    def __init__(self, task: str, cfg: tasks.WorldConfig | None = None,
                 pos_step: float = 0.02, rot_step: float = 0.2):
        self.task = task
        self.cfg = cfg or tasks.WorldConfig()
        self.pos_step = pos_step
        self.rot_step = rot_step

    def action(self, state: WorldState) -> TaskSpaceAction:
        fn = {
            "stabilize": self._stabilize,
            "reach_grasp": self._reach_grasp,
            "insert": self._insert,
            "screw": self._screw,
        }[self.task]
        return fn(state)

    # same interface as TeacherActor so harvest/demo collection can use either
    def task_action(self, state: WorldState) -> TaskSpaceAction:
        return self.action(state)

    def progress(self, state: WorldState) -> float:
        """Monotone-better scalar: larger means closer to success."""
        cfg = self.cfg
        if self.task == "stabilize":
            target = self._corner_target()
            table = state.objects[0].pose.position
            return -float(np.linalg.norm(table - target))
        if self.task == "reach_grasp":
            if state.attached >= 0:
                moved = np.linalg.norm(
                    state.objects[state.attached].pose.position
                    - state.object_init_pos[state.attached]
                )
                return 1.0 + float(moved)
            leg = state.objects[0]
            pose = ee_pose(state.joints.q, state.robot.gripper_length)
            gp = shapes.grasp_point(leg.shape, leg.pose)
            return -float(np.linalg.norm(pose[:2] - gp)) - 0.05 * shapes.orthogonal_distance(
                leg.shape, leg.pose, pose[2]
            )
        if self.task == "insert":
            d_pos, d_vert = tasks.insert_distances(state, cfg)
            return -(d_pos + 0.1 * d_vert)
        # screw: progress is the screwed angle, penalized by deviation
        return state.screw_angle - 2.0 * tasks.screw_deviation(state, cfg)

    # -- per-task controllers -------------------------------------------------

    @staticmethod
    def _pick_heading(point, candidates, current: float, gripper_length: float) -> float:
        """Nearest candidate heading that is kinematically feasible at point."""
        feasible = [h for h in candidates if heading_feasible(point, h, gripper_length)]
        pool = feasible or candidates
        return min(pool, key=lambda h: abs(wrap_angle(h - current)))

    def _corner_target(self) -> np.ndarray:
        cfg = self.cfg
        half = shapes.shape_def("tabletop").half_extents[0]
        return np.array([cfg.front_wall_x - half, cfg.right_wall_y + half])

    def _stabilize(self, state: WorldState) -> TaskSpaceAction:
        cfg = self.cfg
        pose = ee_pose(state.joints.q, state.robot.gripper_length)
        table = state.objects[0]
        box = table.pose.position
        front, right = shapes.wall_contact(
            table.shape, table.pose, cfg.front_wall_x, cfg.right_wall_y, cfg.wall_contact_tol
        )
        # the walls act as fixtures: push +x until the front wall stops the
        # box, then push -y until the right wall does
        if not front:
            push_dir = np.array([1.0, 0.0])
        elif not right:
            push_dir = np.array([0.0, -1.0])
        else:
            return TaskSpaceAction(0.0, 0.0, 0.0, 1)
        rel = pose[:2] - box
        along = float(rel @ push_dir)
        perp = float(abs(rel[0] * push_dir[1] - rel[1] * push_dir[0]))
        if along < -0.02 and perp < 0.05:
            # staged (or already sunk into contact): keep driving through the
            # box center so the face normal stays aligned with the push
            to_box = box - pose[:2]
            move = to_box / max(np.linalg.norm(to_box), 1e-9) * self.pos_step
            return TaskSpaceAction(move[0], move[1], 0.0, 1)
        # navigate to the staging point without cutting through the box
        approach = box - push_dir * 0.13
        to_approach = approach - pose[:2]
        radial = pose[:2] - box
        r = np.linalg.norm(radial)
        if r < 0.13:
            move = radial / max(r, 1e-9) * self.pos_step
        else:
            move = to_approach / max(np.linalg.norm(to_approach), 1e-9) * self.pos_step
        return TaskSpaceAction(move[0], move[1], 0.0, 1)

    def _reach_grasp(self, state: WorldState) -> TaskSpaceAction:
        pose = ee_pose(state.joints.q, state.robot.gripper_length)
        if state.attached >= 0:
            # carry toward the robot base to exceed the lift threshold
            away = -pose[:2] / max(np.linalg.norm(pose[:2]), 1e-9)
            return TaskSpaceAction(away[0] * self.pos_step, away[1] * self.pos_step, 0.0, 0)
        leg = state.objects[0]
        gp = shapes.grasp_point(leg.shape, leg.pose)
        to_gp = gp - pose[:2]
        dist = np.linalg.norm(to_gp)
        d_orth = shapes.orthogonal_distance(leg.shape, leg.pose, pose[2])
        # approach headings: the two exact orthogonals plus offsets inside
        # the grasp tolerance cone, for rods whose orthogonal is unreachable
        cands = [
            leg.pose.theta + side + off
            for side in (np.pi / 2, -np.pi / 2)
            for off in (0.0, 0.25, -0.25, 0.4, -0.4)
        ]
        want = self._pick_heading(gp, cands, pose[2], state.robot.gripper_length)
        dth = _clamp(wrap_angle(want - pose[2]), self.rot_step)
        if dist < 0.7 * self.cfg.grasp_tolerance and d_orth < 0.45:
            return TaskSpaceAction(0.0, 0.0, dth, 0)  # close the gripper
        step = min(self.pos_step, dist)
        move = to_gp / max(dist, 1e-9) * step
        return TaskSpaceAction(move[0], move[1], dth, 1)

    def _insert(self, state: WorldState) -> TaskSpaceAction:
        pose = ee_pose(state.joints.q, state.robot.gripper_length)
        leg = state.objects[1]
        sock = tasks.socket_pose(state)
        to_sock = sock.position - leg.pose.position
        dist = np.linalg.norm(to_sock)
        # leg heading = ee heading + carried offset; align it with the socket
        # axis (mod pi) using a heading that stays reachable at the socket
        rel = state.attach_rel_theta
        cands = [wrap_angle(sock.theta - rel + k * np.pi) for k in (0, 1)]
        want = self._pick_heading(sock.position, cands, pose[2], state.robot.gripper_length)
        dth = _clamp(wrap_angle(want - pose[2]), self.rot_step)
        step = min(self.pos_step, dist)
        move = to_sock / max(dist, 1e-9) * step if dist > 1e-9 else np.zeros(2)
        return TaskSpaceAction(move[0], move[1], dth, 0)

    def _screw(self, state: WorldState) -> TaskSpaceAction:
        """Ratchet cycle: rotate clockwise while gripping, release at the
        reachable-band edge, rewind open-handed, regrasp, repeat."""
        pose = ee_pose(state.joints.q, state.robot.gripper_length)
        peg = state.objects[1]
        sock = state.screw_socket
        bearing = float(np.arctan2(sock[1], sock[0]))
        rel_heading = wrap_angle(pose[2] - bearing)
        if state.attached >= 0:
            if rel_heading > -1.62:
                drift = sock - peg.pose.position
                return TaskSpaceAction(
                    _clamp(drift[0], self.pos_step), _clamp(drift[1], self.pos_step),
                    -self.rot_step, 0,
                )
            return TaskSpaceAction(0.0, 0.0, self.rot_step, 1)  # release at band edge
        # open-handed rewind back to the top of the band, then regrasp
        drift = sock - pose[:2]
        dx = _clamp(drift[0], self.pos_step)
        dy = _clamp(drift[1], self.pos_step)
        if rel_heading < 1.35:
            return TaskSpaceAction(dx, dy, self.rot_step, 1)
        return TaskSpaceAction(dx, dy, 0.0, 0)  # close to regrasp
