// Canvas renderer: a pure function of the latest snapshot. No client-side
// simulation; everything drawn comes from the server.

import { ObjectSnapshot, WorldSnapshot } from "./protocol.js";

const SCALE = 640; // px per meter
const ORIGIN_X = 90; // robot base position on the canvas
const COLOR_SCENE = "#4a7dd4";
const COLOR_GRIPPER = "#d44a4a";
const COLOR_ARM = "#222";
const COLOR_OBJECT = "#7a5c2e";
const COLOR_WALL = "#555";

const SHAPE_EXTENTS: Record<string, { kind: string; hx: number; hy: number; r: number }> = {
  tabletop: { kind: "box", hx: 0.08, hy: 0.08, r: 0 },
  rod: { kind: "box", hx: 0.06, hy: 0.012, r: 0 },
  socket_base: { kind: "box", hx: 0.05, hy: 0.05, r: 0 },
  peg: { kind: "disk", hx: 0, hy: 0, r: 0.03 },
  disk_with_stem: { kind: "disk", hx: 0, hy: 0, r: 0.035 },
};

export function worldToCanvas(x: number, y: number, height: number): [number, number] {
  return [ORIGIN_X + x * SCALE, height / 2 - y * SCALE];
}

function drawObject(ctx: CanvasRenderingContext2D, obj: ObjectSnapshot, height: number) {
  const ext = SHAPE_EXTENTS[obj.shape] ?? { kind: "disk", hx: 0, hy: 0, r: 0.02 };
  const [cx, cy] = worldToCanvas(obj.x, obj.y, height);
  ctx.save();
  ctx.translate(cx, cy);
  ctx.rotate(-obj.theta);
  ctx.strokeStyle = COLOR_OBJECT;
  ctx.lineWidth = 2;
  if (ext.kind === "box") {
    ctx.strokeRect(-ext.hx * SCALE, -ext.hy * SCALE, 2 * ext.hx * SCALE, 2 * ext.hy * SCALE);
  } else {
    ctx.beginPath();
    ctx.arc(0, 0, ext.r * SCALE, 0, 2 * Math.PI);
    ctx.stroke();
  }
  ctx.restore();
}

export function render(
  canvas: HTMLCanvasElement,
  snapshot: WorldSnapshot | null,
  intervened: boolean,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, width, height);
  if (!snapshot) {
    ctx.fillStyle = "#888";
    ctx.font = "16px sans-serif";
    ctx.fillText("waiting for state...", 20, 30);
    return;
  }

  // walls (front at x=0.72, right at y=-0.28)
  ctx.strokeStyle = COLOR_WALL;
  ctx.lineWidth = 4;
  const [fwx] = worldToCanvas(0.72, 0, height);
  const [, rwy] = worldToCanvas(0, -0.28, height);
  ctx.beginPath();
  ctx.moveTo(fwx, height / 2 - 0.45 * SCALE);
  ctx.lineTo(fwx, rwy);
  ctx.lineTo(ORIGIN_X, rwy);
  ctx.stroke();

  // point cloud, colored by semantic label
  for (const [x, y, label] of snapshot.cloud) {
    const [px, py] = worldToCanvas(x, y, height);
    ctx.fillStyle = label > 0.5 ? COLOR_GRIPPER : COLOR_SCENE;
    ctx.fillRect(px - 1.5, py - 1.5, 3, 3);
  }

  // objects
  for (const obj of snapshot.objects) drawObject(ctx, obj, height);

  // arm links, then the gripper segment
  ctx.strokeStyle = COLOR_ARM;
  ctx.lineWidth = 5;
  ctx.beginPath();
  snapshot.arm_points.forEach(([x, y], i) => {
    const [px, py] = worldToCanvas(x, y, height);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  const [ex, ey] = worldToCanvas(snapshot.ee[0], snapshot.ee[1], height);
  ctx.lineTo(ex, ey);
  ctx.stroke();
  ctx.fillStyle = snapshot.gripper === 1 ? "#2c8" : "#c82";
  ctx.beginPath();
  ctx.arc(ex, ey, 6, 0, 2 * Math.PI);
  ctx.fill();

  // intervention banner
  if (intervened) {
    ctx.fillStyle = "rgba(212, 74, 74, 0.9)";
    ctx.fillRect(0, 0, width, 28);
    ctx.fillStyle = "#fff";
    ctx.font = "bold 15px sans-serif";
    ctx.fillText("INTERVENTION - you are driving", 12, 19);
  }
}

export function renderErrorBanner(canvas: HTMLCanvasElement, message: string): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.fillStyle = "rgba(180, 50, 50, 0.85)";
  ctx.fillRect(0, canvas.height - 30, canvas.width, 30);
  ctx.fillStyle = "#fff";
  ctx.font = "13px sans-serif";
  ctx.fillText(message, 10, canvas.height - 10);
}
