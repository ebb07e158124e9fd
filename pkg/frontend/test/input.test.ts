import { describe, expect, it } from "vitest";
import { emptyKeys, keyEvent, keysToDelta, RateLimiter } from "../src/input.js";

describe("keysToDelta", () => {
  it("no keys means no message", () => {
    expect(keysToDelta(emptyKeys(), 0.015, 1)).toBeNull();
  });

  it("up arrow moves forward only", () => {
    const keys = keyEvent(emptyKeys(), "ArrowUp", true);
    const delta = keysToDelta(keys, 0.015, 1);
    expect(delta).not.toBeNull();
    expect(delta!.dx).toBeGreaterThan(0);
    expect(delta!.dy).toBe(0);
    expect(delta!.dtheta).toBe(0);
  });

  it("right arrow is lateral only", () => {
    const keys = keyEvent(emptyKeys(), "ArrowRight", true);
    const delta = keysToDelta(keys, 0.015, 1)!;
    expect(delta.dx).toBe(0);
    expect(delta.dy).toBeLessThan(0);
  });

  it("wasd aliases arrows and q/e rotate", () => {
    let keys = keyEvent(emptyKeys(), "w", true);
    keys = keyEvent(keys, "q", true);
    const delta = keysToDelta(keys, 0.01, 0)!;
    expect(delta.dx).toBeCloseTo(0.01);
    expect(delta.dtheta).toBeGreaterThan(0);
    expect(delta.gripper).toBe(0);
  });

  it("key release cancels motion", () => {
    let keys = keyEvent(emptyKeys(), "w", true);
    keys = keyEvent(keys, "w", false);
    expect(keysToDelta(keys, 0.01, 1)).toBeNull();
  });

  it("speed scales the deltas", () => {
    const keys = keyEvent(emptyKeys(), "ArrowUp", true);
    const slow = keysToDelta(keys, 0.005, 1)!;
    const fast = keysToDelta(keys, 0.02, 1)!;
    expect(fast.dx).toBeCloseTo(4 * slow.dx);
  });
});

describe("RateLimiter", () => {
  it("limits to the configured interval", () => {
    const limiter = new RateLimiter(50);
    expect(limiter.ready(1000)).toBe(true);
    expect(limiter.ready(1030)).toBe(false);
    expect(limiter.ready(1055)).toBe(true);
  });
});
