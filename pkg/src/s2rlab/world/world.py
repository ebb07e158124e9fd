"""Deterministic planar-arm world with quasi-static object interaction.

One environment step advances the joint controller one tick toward the
commanded target, applies gripper/grasp logic, resolves pushes, and
evaluates the task. All randomness flows from the reset seed, so identical
(seed, action sequence) pairs produce bitwise identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import shapes, tasks
from .kinematics import ee_pose, solve_ik
from .randomize import RandomizationConfig, randomize_object, randomize_robot
from .tasks import TaskSpec, WorldConfig, default_task_spec
from .types import BodyPose, JointState, JointTarget, ObjectState, RobotParams, WorldState


@dataclass
class WorldMods:
    """Physical deviations from the nominal world, used by gap injectors."""

    gripper_length_delta: float = 0.0
    object_friction_factor: float = 1.0
    shape_swap: tuple[str, str] | None = None  # (source tag, replacement tag)

    def swap(self, tag: str) -> str:
        if self.shape_swap is not None and tag == self.shape_swap[0]:
            return self.shape_swap[1]
        return tag

    def to_dict(self) -> dict:
        return {
            "gripper_length_delta": self.gripper_length_delta,
            "object_friction_factor": self.object_friction_factor,
            "shape_swap": self.shape_swap,
        }


class Obs:
    """Observation handle: a state snapshot plus a lazily built point cloud."""

    def __init__(self, state: WorldState, cloud_fn):
        self.state = state
        self._cloud_fn = cloud_fn
        self._cloud = None

    @property
    def cloud(self):
        if self._cloud is None:
            self._cloud = self._cloud_fn()
        return self._cloud


# start pose of the grip center per task: (x, y, heading), chosen away from
# fold/extension singularities of the 3-link chain
_START_POSE = {
    "stabilize": (0.40, 0.12, -0.5),
    "reach_grasp": (0.42, 0.10, -0.35),
    "insert": (0.44, 0.10, -0.35),
    # heading starts at the top of the reachable band so a full half-turn
    # sweep stays inside the two-link annulus
    "screw": (0.44, -0.05, 1.34),
}


class PlanarWorld:
    """One task instance. Single-threaded; owns its RNG streams."""

    def __init__(
        self,
        task: str | TaskSpec,
        cfg: WorldConfig | None = None,
        randomization: RandomizationConfig | None = None,
        curriculum: float = 1.0,
        mods: WorldMods | None = None,
        cloud_budget: int = 768,
    ):
        self.spec = default_task_spec(task) if isinstance(task, str) else task
        self.cfg = cfg or WorldConfig()
        self.randomization = randomization
        self.curriculum = float(curriculum)
        self.mods = mods or WorldMods()
        self.cloud_budget = cloud_budget
        self.state: WorldState | None = None
        self._done = True

    # -- construction hooks for gap injectors --------------------------------

    def with_mods(self, **changes) -> "PlanarWorld":
        base = self.mods.to_dict()
        base.update(changes)
        return PlanarWorld(
            self.spec, self.cfg, self.randomization, self.curriculum,
            WorldMods(**base), self.cloud_budget,
        )

    @property
    def task(self) -> str:
        return self.spec.task

    @property
    def episode_length(self) -> int:
        return self.spec.episode_length

    # -- episode lifecycle ----------------------------------------------------

    def reset(self, seed: int) -> Obs:
        rng = np.random.default_rng(seed)
        cfg = self.cfg
        robot = RobotParams(
            limit_lo=np.full(3, -cfg.joint_limit),
            limit_hi=np.full(3, cfg.joint_limit),
            gripper_length=cfg.gripper_length - self.mods.gripper_length_delta,
            max_joint_step=cfg.max_joint_step,
        )
        gravity = 0.0
        if self.randomization is not None:
            gravity = randomize_robot(robot, self.randomization, rng, self.curriculum)

        objects = self._spawn_objects(rng)
        if self.randomization is not None:
            for obj in objects:
                randomize_object(obj, self.randomization, rng, self.curriculum)
        if self.mods.object_friction_factor != 1.0:
            for obj in objects:
                if not obj.static:
                    obj.params.friction_scale *= self.mods.object_friction_factor

        start = _START_POSE[self.spec.task]
        # home is a stored joint configuration solved for the NOMINAL gripper;
        # an embodiment-shifted gripper lands short of the nominal start pose
        q = solve_ik(np.array(start), gripper_length=cfg.gripper_length)
        if self.spec.joint_noise > 0.0:
            q = q + rng.uniform(-self.spec.joint_noise, self.spec.joint_noise, size=3)
        q = np.clip(q, robot.limit_lo, robot.limit_hi)

        hold = self.spec.task in ("insert", "screw")
        joints = JointState(
            q=q,
            gripper=0 if hold else 1,
            gripper_width=0.0 if hold else cfg.gripper_max_width,
        )
        state = WorldState(
            task=self.spec.task,
            step=0,
            episode_seed=int(seed),
            joints=joints,
            robot=robot,
            objects=objects,
            gravity_offset=gravity,
            contacts=np.zeros(len(objects), dtype=bool),
            object_vel=np.zeros((len(objects), 3)),
        )
        self.state = state

        if self.spec.task == "insert":
            self._place_held_object(index=1)
        elif self.spec.task == "screw":
            self._place_held_object(index=1)
            peg = state.objects[1]
            jitter = rng.uniform(-self.spec.translate_range, self.spec.translate_range, size=2)
            state.screw_socket = peg.pose.position + jitter

        state.object_init_pos = np.stack([o.pose.position for o in state.objects])
        self._done = False
        return self._observe()

    def _spawn_objects(self, rng: np.random.Generator) -> list[ObjectState]:
        spec = self.spec
        task = spec.task
        swap = self.mods.swap

        def noise_pose(x, y, theta=0.0):
            dx, dy = rng.uniform(-spec.translate_range, spec.translate_range, size=2)
            dth = rng.uniform(-spec.rotate_range, spec.rotate_range) if spec.rotate_range else 0.0
            return BodyPose(x + dx, y + dy, theta + dth)

        if task == "stabilize":
            objs = [ObjectState("tabletop", noise_pose(0.54, 0.00))]
            # spare legs parked away from the push corridor
            for i, (lx, ly) in enumerate([(0.18, 0.16), (0.18, 0.26), (0.30, 0.16), (0.30, 0.26)]):
                jitter = rng.uniform(-0.02, 0.02, size=2)
                angle = rng.uniform(-np.pi, np.pi)
                objs.append(
                    ObjectState(swap("rod"), BodyPose(lx + jitter[0], ly + jitter[1], angle), graspable=True)
                )
            return objs
        if task == "reach_grasp":
            shape = swap("rod")
            # radius-capped spawn keeps every rod orientation graspable
            radius = rng.uniform(0.34, 0.50)
            bearing = rng.uniform(-0.50, 0.55)
            pose = BodyPose(
                radius * np.cos(bearing), radius * np.sin(bearing),
                rng.uniform(-spec.rotate_range, spec.rotate_range),
            )
            return [ObjectState(shape, pose, graspable=True)]
        if task == "insert":
            table = ObjectState("tabletop", self._insert_table_pose(rng), static=True, pushable=False)
            leg = ObjectState(swap("rod"), BodyPose(0, 0, 0), graspable=True)
            return [table, leg]
        if task == "screw":
            base = ObjectState("socket_base", BodyPose(0.44, -0.05, 0.0), static=True, pushable=False)
            peg = ObjectState(swap("peg"), BodyPose(0, 0, 0), graspable=True)
            return [base, peg]
        raise ValueError(f"unknown task {task!r}")

    def _insert_table_pose(self, rng: np.random.Generator) -> BodyPose:
        spec = self.spec
        dx, dy = rng.uniform(-spec.translate_range, spec.translate_range, size=2)
        dth = rng.uniform(-spec.rotate_range, spec.rotate_range)
        return BodyPose(0.53 + dx, 0.05 + dy, dth)

    def _place_held_object(self, index: int) -> None:
        """Attach an object rigidly at the grip center (pre-grasped reset)."""
        state = self.state
        pose = ee_pose(state.joints.q, state.robot.gripper_length)
        obj = state.objects[index]
        sd = shapes.shape_def(obj.shape)
        off = np.asarray(sd.grasp_offset)
        theta = pose[2]
        c, s = np.cos(theta), np.sin(theta)
        # place the object so its grasp point sits at the grip center, axis
        # along the heading (a pre-grasped part is fed in pencil grip, which
        # keeps every goal heading reachable)
        obj.pose = BodyPose(
            pose[0] - (c * off[0] - s * off[1]),
            pose[1] - (s * off[0] + c * off[1]),
            theta,
        )
        self._attach(index)

    # -- stepping -------------------------------------------------------------

    def step(self, action: JointTarget) -> tuple[Obs, float, bool, dict]:
        if self.state is None or self._done:
            raise RuntimeError("step() on a finished or unreset episode")
        state = self.state
        cfg = self.cfg
        robot = state.robot

        q_prev = state.joints.q.copy()
        pose_prev = ee_pose(q_prev, robot.gripper_length)
        poses_prev = [o.pose.clone() for o in state.objects]

        target = np.clip(np.asarray(action.q, dtype=np.float64), robot.limit_lo, robot.limit_hi)
        clamped = bool(np.any(target != np.asarray(action.q)))
        q_new = q_prev + np.clip(target - q_prev, -robot.max_joint_step, robot.max_joint_step)
        state.joints.q = q_new

        grip_open = int(action.gripper) == 1
        state.joints.gripper = 1 if grip_open else 0
        state.joints.gripper_width = cfg.gripper_max_width if grip_open else 0.0
        if grip_open and state.attached >= 0:
            self._detach()

        pose_new = ee_pose(q_new, robot.gripper_length)
        dtheta_ee = float(np.arctan2(np.sin(pose_new[2] - pose_prev[2]),
                                     np.cos(pose_new[2] - pose_prev[2])))
        if state.attached >= 0:
            self._carry_attached(pose_new, dtheta_ee)
        elif not grip_open:
            self._try_attach(pose_new)

        contacts = np.zeros(len(state.objects), dtype=bool)
        if state.attached >= 0:
            contacts[state.attached] = True
        ee_motion = pose_new[:2] - pose_prev[:2]
        self._resolve_pushes(pose_new, ee_motion, contacts)

        state.qd = q_new - q_prev
        state.ee_vel = np.array(
            [pose_new[0] - pose_prev[0], pose_new[1] - pose_prev[1], dtheta_ee]
        )
        state.object_vel = np.array(
            [
                [o.pose.x - p.x, o.pose.y - p.y,
                 np.arctan2(np.sin(o.pose.theta - p.theta), np.cos(o.pose.theta - p.theta))]
                for o, p in zip(state.objects, poses_prev)
            ]
        )
        state.contacts = contacts
        state.step += 1

        action_norm = float(np.linalg.norm(target - q_prev))
        reward = self._reward(action_norm)
        succ = tasks.success(state, cfg, self._threshold_scale())
        fail = state.task == "screw" and tasks.failure_screw(state, cfg)
        timeout = state.step >= self.spec.episode_length
        done = succ or fail or timeout
        self._done = done
        info = {"success": succ, "failure": fail, "timeout": timeout and not succ and not fail,
                "clamped": clamped, "attached": state.attached}
        return self._observe(), reward, done, info

    def _threshold_scale(self) -> float:
        # curriculum relaxes the insert tolerance early in training
        return 1.0 + 2.0 * (1.0 - self.curriculum)

    def _reward(self, action_norm: float) -> float:
        state, spec, cfg = self.state, self.spec, self.cfg
        if state.task == "stabilize":
            return tasks.reward_stabilize(state, action_norm, spec, cfg)
        if state.task == "reach_grasp":
            return tasks.reward_reach_grasp(state, spec, cfg)
        if state.task == "insert":
            return tasks.reward_insert(state, spec, cfg, self._threshold_scale())
        return tasks.reward_screw(state, spec, cfg)

    # -- grasping -------------------------------------------------------------

    def _attach(self, index: int) -> None:
        state = self.state
        pose = ee_pose(state.joints.q, state.robot.gripper_length)
        obj = state.objects[index]
        c, s = np.cos(-pose[2]), np.sin(-pose[2])
        rel = obj.pose.position - pose[:2]
        state.attached = index
        state.attach_rel_pos = np.array([c * rel[0] - s * rel[1], s * rel[0] + c * rel[1]])
        state.attach_rel_theta = obj.pose.theta - pose[2]
        state.joints.gripper = 0
        state.joints.gripper_width = 0.0

    def _detach(self) -> None:
        self.state.attached = -1
        self.state.attach_rel_pos = np.zeros(2)
        self.state.attach_rel_theta = 0.0

    def _try_attach(self, pose_new: np.ndarray) -> None:
        state = self.state
        # grasp-geometry curriculum: tolerances start wide and tighten to
        # nominal as the stage approaches 1 (evaluation always runs at 1)
        ease = 1.0 + 1.5 * (1.0 - self.curriculum)
        best, best_dist = -1, np.inf
        for i, obj in enumerate(state.objects):
            if not obj.graspable or obj.static:
                continue
            point = shapes.grasp_point(obj.shape, obj.pose)
            dist = float(np.linalg.norm(point - pose_new[:2]))
            if dist <= self.cfg.grasp_tolerance * ease and dist < best_dist:
                if shapes.grasp_orientation_ok(obj.shape, obj.pose, pose_new[2], ease):
                    best, best_dist = i, dist
        if best >= 0:
            self._attach(best)

    def _carry_attached(self, pose_new: np.ndarray, dtheta_ee: float) -> None:
        state = self.state
        obj = state.objects[state.attached]
        if state.task == "screw" and state.attached == 1:
            # rotation transmission slips when the grip friction is low
            slip = min(1.0, obj.params.friction_scale)
            new_theta = obj.pose.theta + slip * dtheta_ee
            state.screw_angle = max(0.0, state.screw_angle - slip * dtheta_ee)
            c, s = np.cos(pose_new[2]), np.sin(pose_new[2])
            rel = state.attach_rel_pos
            obj.pose = BodyPose(
                pose_new[0] + c * rel[0] - s * rel[1],
                pose_new[1] + s * rel[0] + c * rel[1],
                new_theta,
            )
            state.attach_rel_theta = obj.pose.theta - pose_new[2]
            return
        c, s = np.cos(pose_new[2]), np.sin(pose_new[2])
        rel = state.attach_rel_pos
        obj.pose = BodyPose(
            pose_new[0] + c * rel[0] - s * rel[1],
            pose_new[1] + s * rel[0] + c * rel[1],
            pose_new[2] + state.attach_rel_theta,
        )

    # -- pushing --------------------------------------------------------------

    def _resolve_pushes(self, pose_new: np.ndarray, ee_motion: np.ndarray, contacts: np.ndarray) -> None:
        state, cfg = self.state, self.cfg
        grip_open = state.joints.gripper == 1
        for i, obj in enumerate(state.objects):
            if i == state.attached or obj.static or not obj.pushable:
                continue
            if grip_open and obj.graspable:
                # open fingers straddle graspable objects instead of shoving them
                continue
            depth, normal = shapes.disk_shape_penetration(
                pose_new[:2], cfg.ee_contact_radius, obj.shape, obj.pose, motion=ee_motion
            )
            if depth <= 0.0:
                continue
            contacts[i] = True
            efficiency = min(1.0, 1.0 / obj.params.friction_scale)
            shift = normal * depth * efficiency
            moved = BodyPose(obj.pose.x + shift[0], obj.pose.y + shift[1], obj.pose.theta)
            obj.pose = shapes.clamp_to_walls(obj.shape, moved, cfg.front_wall_x, cfg.right_wall_y)

    # -- observation ----------------------------------------------------------

    def _observe(self) -> Obs:
        snapshot = self.state.clone()
        budget = self.cloud_budget

        def build():
            from ..cloud.synth import synthesize_scene

            return synthesize_scene(snapshot, budget)

        return Obs(snapshot, build)
