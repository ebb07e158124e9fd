// Keyboard -> task-space deltas. Arrows/WASD translate, Q/E rotate, space
// toggles the gripper. Deltas scale with the speed slider and are only
// dispatched while intervention is on (the caller enforces that).

import { TeleopDelta } from "./protocol.js";

export interface KeyState {
  up: boolean;
  down: boolean;
  left: boolean;
  right: boolean;
  ccw: boolean;
  cw: boolean;
}

export function emptyKeys(): KeyState {
  return { up: false, down: false, left: false, right: false, ccw: false, cw: false };
}

const KEYMAP: Record<string, keyof KeyState> = {
  ArrowUp: "up",
  ArrowDown: "down",
  ArrowLeft: "left",
  ArrowRight: "right",
  w: "up",
  s: "down",
  a: "left",
  d: "right",
  q: "ccw",
  e: "cw",
};

export function keyEvent(keys: KeyState, key: string, pressed: boolean): KeyState {
  const field = KEYMAP[key.length === 1 ? key.toLowerCase() : key];
  if (!field) return keys;
  return { ...keys, [field]: pressed };
}

// Screen-aligned mapping: up on the keyboard moves the arm away from the
// base (+x), right moves toward the robot's right (-y).
export function keysToDelta(keys: KeyState, speed: number, gripper: 0 | 1): TeleopDelta | null {
  const dx = (keys.up ? 1 : 0) - (keys.down ? 1 : 0);
  const dy = (keys.left ? 1 : 0) - (keys.right ? 1 : 0);
  const dtheta = (keys.ccw ? 1 : 0) - (keys.cw ? 1 : 0);
  if (dx === 0 && dy === 0 && dtheta === 0) return null;
  return {
    dx: dx * speed,
    dy: dy * speed,
    dtheta: dtheta * speed * 6.0,
    gripper,
  };
}

export class RateLimiter {
  private last = 0;

  constructor(private intervalMs: number) {}

  ready(now: number): boolean {
    if (now - this.last >= this.intervalMs) {
      this.last = now;
      return true;
    }
    return false;
  }
}
