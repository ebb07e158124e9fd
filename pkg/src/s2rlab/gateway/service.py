"""Websocket teleop service: one client drives one live collection session.

Two logical activities share a queue pair: the session thread steps the
environment (base policy or human corrections, per the operator contract)
and publishes state snapshots; the websocket endpoint routes client
messages into the operator and drains the outbound queue. The environment
never executes a human action unless the session is in the intervened
state; provenance is recorded per step by the collection loop itself.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from ..distill.io import write_rows
from ..hitl.collect import collect
from ..hitl.operator import OperatorDisconnect
from ..hitl.stats import intervention_stats
from ..world.kinematics import ee_pose, joint_positions
from ..world.types import TaskSpaceAction
from .config import RunConfig
from .pipeline import Pipeline, gap_key
from .protocol import WIRE_VERSION, ClientStream, ProtocolError, ack, error, make_message


class LiveOperator:
    """Operator contract backed by websocket messages."""

    def __init__(self, timeout: float = 10.0):
        self.timeout = timeout
        self.flag = threading.Event()
        self.abort = threading.Event()
        self.teleop: queue.Queue[TaskSpaceAction] = queue.Queue()

    def start_episode(self):
        self.abort.clear()
        while not self.teleop.empty():
            self.teleop.get_nowait()

    def _check_abort(self):
        if self.abort.is_set():
            raise OperatorDisconnect("session reset")

    def intervene(self, obs, obs_next) -> bool:
        self._check_abort()
        return self.flag.is_set()

    def begin_correction(self, obs):
        pass

    def correct_action(self, obs) -> TaskSpaceAction:
        deadline = time.monotonic() + self.timeout
        while True:
            self._check_abort()
            if not self.flag.is_set():
                # released between queue polls: hold still for one tick
                return TaskSpaceAction(0.0, 0.0, 0.0, obs.state.joints.gripper)
            try:
                return self.teleop.get(timeout=0.05)
            except queue.Empty:
                if time.monotonic() > deadline:
                    raise OperatorDisconnect("operator timeout") from None

    def release(self, obs, steps_in_correction) -> bool:
        self._check_abort()
        return not self.flag.is_set()


class StreamingEnv:
    """Env wrapper that publishes a snapshot after every transition and
    paces stepping to the configured tick rate."""

    def __init__(self, inner, outbound: "Session", tick_hz: float, preview: int):
        self.inner = inner
        self.session = outbound
        self.dt = 1.0 / tick_hz if tick_hz > 0 else 0.0
        self.preview = preview
        self._last = 0.0

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def _pace(self):
        now = time.monotonic()
        wait = self._last + self.dt - now
        if wait > 0:
            time.sleep(wait)
        self._last = time.monotonic()

    def reset(self, seed):
        obs = self.inner.reset(seed)
        self.session.publish_state(obs)
        return obs

    def step(self, action):
        self._pace()
        out = self.inner.step(action)
        self.session.publish_state(out[0])
        return out


def snapshot_payload(obs, preview: int) -> dict:
    state = obs.state
    cloud = obs.cloud
    n = len(cloud)
    stride = max(1, n // preview)
    idx = np.arange(0, n, stride)[:preview]
    pose = ee_pose(state.joints.q, state.robot.gripper_length)
    return {
        "task": state.task,
        "step": state.step,
        "episode_seed": state.episode_seed,
        "joints": state.joints.q.tolist(),
        "gripper": state.joints.gripper,
        "gripper_width": state.joints.gripper_width,
        "arm_points": joint_positions(state.joints.q).tolist(),
        "ee": pose.tolist(),
        "gripper_length": state.robot.gripper_length,
        "objects": [
            {"shape": o.shape, "x": o.pose.x, "y": o.pose.y, "theta": o.pose.theta}
            for o in state.objects
        ],
        "cloud": np.concatenate(
            [cloud.points[idx], cloud.labels[idx, None].astype(float)], axis=1
        ).tolist(),
        "attached": state.attached,
    }


class Session:
    """One live collection session bound to at most one client."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.pipe = Pipeline(cfg)
        self.operator = LiveOperator(timeout=10.0)
        self.outbound: queue.Queue[dict] = queue.Queue(maxsize=512)
        self.lock = threading.Lock()
        self.records = []
        self.log_rows = []
        self.episode_counter = 0
        self.client_attached = False
        self._server_seq = 0
        self._thread: threading.Thread | None = None
        self._stop = threading.Event()
        self._intervened = False

    def next_seq(self) -> int:
        self._server_seq += 1
        return self._server_seq

    def publish_state(self, obs) -> None:
        msg = make_message(
            "state",
            self.next_seq(),
            {
                "snapshot": snapshot_payload(obs, int(self.cfg.raw["serve"]["cloud_preview"])),
                "intervened": self.operator.flag.is_set(),
                "episodes": self.episode_counter,
                "records": len(self.records),
            },
        )
        try:
            self.outbound.put_nowait(msg)
        except queue.Full:
            pass  # drop frames rather than stall the env loop

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        self.operator.abort.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)

    def _run(self) -> None:
        student, _ = self.pipe.student()
        serve = self.cfg.raw["serve"]
        while not self._stop.is_set():
            env = StreamingEnv(
                self.pipe.real_env(), self, float(serve["tick_hz"]), int(serve["cloud_preview"])
            )
            seed = self.cfg.seed + 9000 + self.episode_counter
            records, log = collect(student, env, self.operator, n_traj=1, seed=seed)
            with self.lock:
                discarded = log.episodes and log.episodes[0].get("discarded")
                if not discarded:
                    for rec in records:
                        rec.episode = self.episode_counter
                        self.records.append(rec)
                    for step in log.steps:
                        step.episode = self.episode_counter
                    for ep in log.episodes:
                        ep["episode"] = self.episode_counter
                    self.log_rows.extend(log.to_rows())
                self.episode_counter += 1

    def save(self) -> dict:
        with self.lock:
            key = gap_key(self.cfg.gap_configs())
            rec_path = self.pipe.out / f"live_corrections_{key}.jsonl"
            log_path = self.pipe.out / f"live_session_{key}.jsonl"
            write_rows(rec_path, [r.to_dict() for r in self.records])
            write_rows(log_path, self.log_rows)
            return {
                "count": len(self.records),
                "records_path": str(rec_path),
                "session_path": str(log_path),
            }


def build_app(cfg: RunConfig, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="s2rlab teleop service")
    session = Session(cfg)
    app.state.session = session

    @app.on_event("startup")
    def _startup():
        session.start()

    @app.on_event("shutdown")
    def _shutdown():
        session.stop()

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        import anyio

        await ws.accept()
        if session.client_attached:
            await ws.send_json(error(session.next_seq(), "session already has a client"))
            await ws.close()
            return
        session.client_attached = True
        stream = ClientStream()
        stop_writer = threading.Event()

        async def writer():
            while not stop_writer.is_set():
                try:
                    msg = session.outbound.get_nowait()
                except queue.Empty:
                    await anyio.sleep(0.005)
                    continue
                await ws.send_json(msg)

        async with anyio.create_task_group() as tg:
            tg.start_soon(writer)
            try:
                while True:
                    raw = await ws.receive_json()
                    try:
                        msg_type, seq, payload = stream.accept(raw)
                    except ProtocolError as exc:
                        await ws.send_json(error(session.next_seq(), str(exc)))
                        continue
                    if msg_type == "hello":
                        await ws.send_json(
                            ack(session.next_seq(), seq, {"version": WIRE_VERSION,
                                                          "task": cfg.task})
                        )
                    elif msg_type == "intervene_on":
                        session.operator.flag.set()
                        await ws.send_json(ack(session.next_seq(), seq))
                    elif msg_type == "intervene_off":
                        session.operator.flag.clear()
                        await ws.send_json(ack(session.next_seq(), seq))
                    elif msg_type == "teleop":
                        if session.operator.flag.is_set():
                            session.operator.teleop.put(
                                TaskSpaceAction(
                                    float(payload["dx"]), float(payload["dy"]),
                                    float(payload["dtheta"]), int(payload["gripper"]),
                                )
                            )
                            await ws.send_json(ack(session.next_seq(), seq))
                        else:
                            await ws.send_json(
                                error(session.next_seq(),
                                      "teleop outside intervention", for_seq=seq)
                            )
                    elif msg_type == "reset":
                        session.operator.abort.set()
                        session.operator.flag.clear()
                        await ws.send_json(ack(session.next_seq(), seq))
                    elif msg_type == "save":
                        info = session.save()
                        await ws.send_json(ack(session.next_seq(), seq, info))
            except WebSocketDisconnect:
                pass
            finally:
                stop_writer.set()
                session.client_attached = False
                tg.cancel_scope.cancel()

    if frontend_dir and Path(frontend_dir).exists():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")
    return app
