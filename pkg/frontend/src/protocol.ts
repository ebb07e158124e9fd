// Wire protocol shared with the gateway service. Envelope: {type, seq, payload};
// client sequence numbers increase strictly, the server echoes them in acks.

export const WIRE_VERSION = "1";

export type ClientType = "hello" | "intervene_on" | "intervene_off" | "teleop" | "reset" | "save";
export type ServerType = "state" | "ack" | "error";

export interface WireMessage {
  type: string;
  seq: number;
  payload: Record<string, unknown>;
}

export interface TeleopDelta {
  dx: number;
  dy: number;
  dtheta: number;
  gripper: 0 | 1;
}

export interface ObjectSnapshot {
  shape: string;
  x: number;
  y: number;
  theta: number;
}

export interface WorldSnapshot {
  task: string;
  step: number;
  episode_seed: number;
  joints: number[];
  gripper: number;
  gripper_width: number;
  arm_points: number[][];
  ee: number[];
  gripper_length: number;
  objects: ObjectSnapshot[];
  cloud: number[][]; // [x, y, label]
  attached: number;
}

export interface StatePayload {
  snapshot: WorldSnapshot;
  intervened: boolean;
  episodes: number;
  records: number;
}

export class MessageSequencer {
  private seq = 0;

  make(type: ClientType, payload: Record<string, unknown> = {}): WireMessage {
    this.seq += 1;
    return { type, seq: this.seq, payload };
  }

  hello(): WireMessage {
    return this.make("hello", { version: WIRE_VERSION });
  }

  teleop(delta: TeleopDelta): WireMessage {
    return this.make("teleop", { ...delta });
  }
}

export function parseServerMessage(raw: string): WireMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const msg = doc as WireMessage;
  if (typeof msg.type !== "string" || typeof msg.seq !== "number") return null;
  if (msg.type !== "state" && msg.type !== "ack" && msg.type !== "error") return null;
  if (typeof msg.payload !== "object" || msg.payload === null) return null;
  return msg;
}
