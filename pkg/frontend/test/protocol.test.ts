import { describe, expect, it } from "vitest";
import { MessageSequencer, parseServerMessage, WIRE_VERSION } from "../src/protocol.js";

describe("MessageSequencer", () => {
  it("strictly increases sequence numbers", () => {
    const seq = new MessageSequencer();
    const a = seq.hello();
    const b = seq.make("reset");
    const c = seq.teleop({ dx: 0.01, dy: 0, dtheta: 0, gripper: 1 });
    expect(a.seq).toBe(1);
    expect(b.seq).toBe(2);
    expect(c.seq).toBe(3);
  });

  it("hello carries the protocol version", () => {
    const msg = new MessageSequencer().hello();
    expect(msg.payload["version"]).toBe(WIRE_VERSION);
  });

  it("teleop payload carries all four fields", () => {
    const msg = new MessageSequencer().teleop({ dx: 0.01, dy: -0.02, dtheta: 0.1, gripper: 0 });
    expect(msg.payload).toEqual({ dx: 0.01, dy: -0.02, dtheta: 0.1, gripper: 0 });
  });
});

describe("parseServerMessage", () => {
  it("accepts valid server envelopes", () => {
    const msg = parseServerMessage(JSON.stringify({ type: "ack", seq: 5, payload: { for_seq: 2 } }));
    expect(msg?.type).toBe("ack");
    expect(msg?.payload["for_seq"]).toBe(2);
  });

  it("rejects client-typed and malformed messages", () => {
    expect(parseServerMessage('{"type":"teleop","seq":1,"payload":{}}')).toBeNull();
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage('{"type":"state"}')).toBeNull();
  });
});
