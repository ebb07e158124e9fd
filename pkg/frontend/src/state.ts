// Client session state. The server is the single source of truth; this is
// a cache of the latest snapshot plus connection/UI bookkeeping.

import { StatePayload, WireMessage, WorldSnapshot } from "./protocol.js";

export interface UiSessionState {
  connection: "connecting" | "open" | "closed" | "error";
  snapshot: WorldSnapshot | null;
  intervened: boolean;
  episodes: number;
  records: number;
  savedCount: number | null;
  lastError: string | null;
  lastAckSeq: number | null;
}

export function initialState(): UiSessionState {
  return {
    connection: "connecting",
    snapshot: null,
    intervened: false,
    episodes: 0,
    records: 0,
    savedCount: null,
    lastError: null,
    lastAckSeq: null,
  };
}

export function applyServerMessage(state: UiSessionState, msg: WireMessage): UiSessionState {
  if (msg.type === "state") {
    const p = msg.payload as unknown as StatePayload;
    return {
      ...state,
      snapshot: p.snapshot,
      intervened: p.intervened,
      episodes: p.episodes,
      records: p.records,
    };
  }
  if (msg.type === "ack") {
    const next = { ...state, lastAckSeq: msg.payload["for_seq"] as number };
    if (typeof msg.payload["count"] === "number") {
      next.savedCount = msg.payload["count"] as number;
    }
    return next;
  }
  if (msg.type === "error") {
    return { ...state, lastError: String(msg.payload["reason"] ?? "unknown error") };
  }
  return state;
}
