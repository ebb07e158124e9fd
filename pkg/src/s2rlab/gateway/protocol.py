"""Wire protocol for the teleop service: JSON envelopes over a websocket."""

from __future__ import annotations

WIRE_VERSION = "1"

CLIENT_TYPES = ("hello", "intervene_on", "intervene_off", "teleop", "reset", "save")
SERVER_TYPES = ("state", "ack", "error")


class ProtocolError(ValueError):
    pass


def make_message(msg_type: str, seq: int, payload: dict | None = None) -> dict:
    if msg_type not in CLIENT_TYPES + SERVER_TYPES:
        raise ProtocolError(f"unknown message type {msg_type!r}")
    return {"type": msg_type, "seq": seq, "payload": payload or {}}


def ack(seq: int, for_seq: int, payload: dict | None = None) -> dict:
    body = {"for_seq": for_seq}
    body.update(payload or {})
    return make_message("ack", seq, body)


def error(seq: int, reason: str, for_seq: int | None = None) -> dict:
    body = {"reason": reason}
    if for_seq is not None:
        body["for_seq"] = for_seq
    return make_message("error", seq, body)


class ClientStream:
    """Validates inbound client messages and enforces monotone sequencing."""

    def __init__(self):
        self.last_seq = -1

    def accept(self, raw: dict) -> tuple[str, int, dict]:
        if not isinstance(raw, dict):
            raise ProtocolError("message must be a JSON object")
        missing = {"type", "seq", "payload"} - set(raw)
        if missing:
            raise ProtocolError(f"missing fields {sorted(missing)}")
        msg_type = raw["type"]
        if msg_type not in CLIENT_TYPES:
            raise ProtocolError(f"unexpected client message type {msg_type!r}")
        seq = raw["seq"]
        if not isinstance(seq, int) or seq <= self.last_seq:
            raise ProtocolError(f"seq must increase strictly (last {self.last_seq}, got {seq})")
        self.last_seq = seq
        payload = raw["payload"]
        if not isinstance(payload, dict):
            raise ProtocolError("payload must be an object")
        if msg_type == "hello" and payload.get("version") != WIRE_VERSION:
            raise ProtocolError(
                f"protocol version mismatch: want {WIRE_VERSION}, got {payload.get('version')!r}"
            )
        if msg_type == "teleop":
            for key in ("dx", "dy", "dtheta"):
                if not isinstance(payload.get(key), (int, float)):
                    raise ProtocolError(f"teleop payload missing numeric {key!r}")
            if payload.get("gripper") not in (0, 1):
                raise ProtocolError("teleop payload needs gripper bit 0|1")
        return msg_type, seq, payload
