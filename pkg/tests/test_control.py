import numpy as np
import pytest

from s2rlab.control import JointTarget, TaskSpaceAction, ik_step, joint_controller, relabel
from s2rlab.control.ik import DAMPING, task_space_target
from s2rlab.world import PlanarWorld, ee_pose
from s2rlab.world.kinematics import NEUTRAL_Q, jacobian


class TestIk:
    def test_zero_delta_is_fixed_point(self):
        q = np.array([0.4, -0.5, -0.3])
        res = ik_step(q, TaskSpaceAction(0, 0, 0, 1))
        np.testing.assert_allclose(res.target.q, q, atol=1e-12)

    def test_small_delta_first_order_accuracy(self):
        q = np.array([1.0, -1.8, 0.6])  # well-conditioned pose
        delta = 1e-3
        res = ik_step(q, TaskSpaceAction(delta, 0, 0, 1))
        before = ee_pose(q, 0.10)
        after = ee_pose(res.target.q, 0.10)
        moved = after[:2] - before[:2]
        assert abs(moved[0] - delta) <= 0.05 * delta
        assert abs(moved[1]) <= 0.05 * delta

    def test_singular_pose_motion_bounded_by_damping(self):
        q = np.zeros(3)  # fully extended: outward x is unreachable
        delta = 0.05
        res = ik_step(q, TaskSpaceAction(delta, 0, 0, 1))
        assert res.near_singular
        # ||dq|| <= ||twist|| / (2 * damping) from the damped pseudo-inverse
        assert np.linalg.norm(res.target.q - q) <= delta / (2 * DAMPING) + 1e-9

    def test_limits_clamped_and_flagged(self):
        q = np.array([2.85, 0.0, 0.0])
        res = ik_step(
            q, TaskSpaceAction(0, 0.05, 0.3, 1),
            limit_lo=np.full(3, -2.9), limit_hi=np.full(3, 2.9),
        )
        assert (res.target.q <= 2.9).all() and (res.target.q >= -2.9).all()

    def test_max_dq_rescales_direction_preserved(self):
        q = NEUTRAL_Q.copy()
        full = ik_step(q, TaskSpaceAction(0.05, -0.05, 0.3, 1))
        scaled = ik_step(q, TaskSpaceAction(0.05, -0.05, 0.3, 1), max_dq=0.05)
        dq_full = full.target.q - q
        dq_scaled = scaled.target.q - q
        assert np.max(np.abs(dq_scaled)) <= 0.05 + 1e-12
        ratio = dq_scaled / dq_full
        np.testing.assert_allclose(ratio, ratio[0], atol=1e-9)


class TestJointController:
    def test_target_equals_current(self):
        q = np.array([0.1, 0.2, 0.3])
        np.testing.assert_array_equal(joint_controller(q, JointTarget(q.copy(), 1)), q)

    def test_scalar_clamp(self):
        out = joint_controller(np.array([0.0]), JointTarget(np.array([1.0]), 1), max_step=0.3)
        assert out[0] == pytest.approx(0.3)

    def test_convergence_in_ceil_steps(self):
        q = np.array([0.0])
        target = JointTarget(np.array([1.0]), 1)
        steps = 0
        while abs(q[0] - 1.0) > 1e-12:
            q = joint_controller(q, target, max_step=0.3)
            steps += 1
        assert steps == int(np.ceil(1.0 / 0.3))


class TestRelabel:
    def test_short_trajectory_gives_empty(self):
        assert relabel([{"q": [0, 0, 0], "gripper_cmd": 1}]) == []
        assert relabel([]) == []

    def test_two_step_definition(self):
        traj = [
            {"q": [0.0, 0.0, 0.0], "gripper_cmd": 1},
            {"q": [0.1, 0.0, -0.1], "gripper_cmd": 0},
        ]
        out = relabel(traj)
        assert len(out) == 1
        step, target = out[0]
        np.testing.assert_array_equal(target.q, [0.1, 0.0, -0.1])
        assert target.gripper == 1  # gripper bit copied from the acting step

    def test_constant_pose_targets_equal_current(self):
        traj = [{"q": [0.2, 0.2, 0.2], "gripper_cmd": 1} for _ in range(5)]
        for _, target in relabel(traj):
            np.testing.assert_array_equal(target.q, [0.2, 0.2, 0.2])

    def test_replay_reproduces_teacher_joint_sequence(self):
        # the central action-space-distillation data contract
        from s2rlab.hitl.experts import ScriptedExpert

        env = PlanarWorld("reach_grasp")
        expert = ScriptedExpert("reach_grasp")
        obs = env.reset(3)
        traj = []
        done = False
        while not done:
            state = obs.state
            act = expert.action(state)
            res = task_space_target(state, act)
            traj.append({"q": state.joints.q.tolist(), "gripper_cmd": act.gripper})
            obs, _, done, info = env.step(res.target)
        traj.append({"q": obs.state.joints.q.tolist(), "gripper_cmd": act.gripper})
        assert info["success"]

        pairs = relabel(traj)
        replay_env = PlanarWorld("reach_grasp")
        robs = replay_env.reset(3)
        max_dev = 0.0
        for (step, target) in pairs:
            np.testing.assert_allclose(robs.state.joints.q, step["q"], atol=1e-9)
            robs, _, rdone, _ = replay_env.step(target)
            max_dev = max(max_dev, float(np.max(np.abs(robs.state.joints.q - target.q))))
        assert max_dev < 1e-9
