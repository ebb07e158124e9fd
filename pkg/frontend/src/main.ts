import { GatewayClient } from "./client.js";
import { emptyKeys, keyEvent, keysToDelta, RateLimiter } from "./input.js";
import { render, renderErrorBanner } from "./render.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const statusLine = document.getElementById("status") as HTMLElement;
const interveneBtn = document.getElementById("intervene") as HTMLButtonElement;
const resetBtn = document.getElementById("reset") as HTMLButtonElement;
const saveBtn = document.getElementById("save") as HTMLButtonElement;
const speedSlider = document.getElementById("speed") as HTMLInputElement;
const hint = document.getElementById("hint") as HTMLElement;

const url = `ws://${window.location.host}/ws`;
const client = new GatewayClient(url);

let keys = emptyKeys();
let gripper: 0 | 1 = 1;
const limiter = new RateLimiter(50); // matches the 20 Hz server tick

client.onChange = (state) => {
  statusLine.textContent =
    `${state.connection} | episodes ${state.episodes} | records ${state.records}` +
    (state.savedCount !== null ? ` | saved ${state.savedCount}` : "");
  interveneBtn.textContent = state.intervened ? "Release (I)" : "Intervene (I)";
  interveneBtn.className = state.intervened ? "active" : "";
};

window.addEventListener("keydown", (ev) => {
  if (ev.key === " ") {
    gripper = gripper === 1 ? 0 : 1;
    ev.preventDefault();
    return;
  }
  if (ev.key === "i" || ev.key === "I") {
    client.setIntervention(!client.state.intervened);
    return;
  }
  keys = keyEvent(keys, ev.key, true);
});
window.addEventListener("keyup", (ev) => {
  keys = keyEvent(keys, ev.key, false);
});

interveneBtn.onclick = () => client.setIntervention(!client.state.intervened);
resetBtn.onclick = () => client.reset();
saveBtn.onclick = () => client.save();

function tick(now: number) {
  const speed = Number(speedSlider.value) / 1000; // meters per message
  const delta = keysToDelta(keys, speed, gripper);
  if (delta && limiter.ready(now)) {
    const sent = client.teleop(delta);
    hint.textContent = sent ? "" : "enable intervention to drive";
  }
  render(canvas, client.state.snapshot, client.state.intervened);
  if (client.state.lastError) {
    renderErrorBanner(canvas, client.state.lastError);
  }
  requestAnimationFrame(tick);
}
requestAnimationFrame(tick);
