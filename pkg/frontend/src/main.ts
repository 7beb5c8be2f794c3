/**
 * Cockpit wiring: canvas, pointer steering, plane/mode toggles, network.
 * Server address comes from the URL query (?host=...&port=...).
 */

import { BridgeClient } from "./net.js";
import { screenToWorkspace, Throttle, Viewport } from "./mapping.js";
import {
  applySnapshot, initialModel, setInputMode, setStatus, togglePlane, ViewModel,
} from "./model.js";
import { render } from "./render.js";
import { handMessage } from "./protocol.js";

const params = new URLSearchParams(window.location.search);
const host = params.get("host") ?? "127.0.0.1";
const port = params.get("port") ?? "8765";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const planeButton = document.getElementById("plane") as HTMLButtonElement;
const steerButton = document.getElementById("steer") as HTMLButtonElement;
const pauseButton = document.getElementById("pause") as HTMLButtonElement;
const resetButton = document.getElementById("reset") as HTMLButtonElement;
const statusSpan = document.getElementById("status") as HTMLSpanElement;

let model: ViewModel = initialModel();
let paused = false;
const throttle = new Throttle(60);

const client = new BridgeClient(`ws://${host}:${port}`, {
  onSnapshot(snap) {
    model = applySnapshot(model, snap, performance.now());
  },
  onStatus(status) {
    model = setStatus(model, status);
    statusSpan.textContent = status;
  },
  onHello(dt, digest) {
    statusSpan.textContent = `connected (dt=${dt}s, config ${digest.slice(0, 8)})`;
  },
});
client.connect();

function viewport(): Viewport {
  return { width: canvas.width, height: canvas.height };
}

function pointerWorkspace(ev: PointerEvent): [number, number, number] {
  const rect = canvas.getBoundingClientRect();
  const sx = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const sy = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  return screenToWorkspace(model.plane, sx, sy, viewport(), model.heldCoord);
}

canvas.addEventListener("pointerdown", (ev) => {
  if (model.inputMode !== "steer") return;
  canvas.setPointerCapture(ev.pointerId);
  model = { ...model, engaged: true };
  client.send(handMessage(pointerWorkspace(ev), true));
});

canvas.addEventListener("pointermove", (ev) => {
  if (!model.engaged || model.inputMode !== "steer") return;
  if (!throttle.ready(performance.now())) return;
  client.send(handMessage(pointerWorkspace(ev), true));
});

function release(ev: PointerEvent): void {
  if (!model.engaged) return;
  model = { ...model, engaged: false };
  client.send(handMessage(pointerWorkspace(ev), false)); // exactly one
}
canvas.addEventListener("pointerup", release);
canvas.addEventListener("pointercancel", release);

planeButton.addEventListener("click", () => {
  // hold the off-plane coordinate at the marker's current value
  const snap = model.snapshot;
  if (snap !== null) {
    model = { ...model, heldCoord: model.plane === "top" ? snap.hand[2] : snap.hand[1] };
  }
  model = togglePlane(model);
  planeButton.textContent = model.plane === "top" ? "plane: top x-y" : "plane: side x-z";
});

steerButton.addEventListener("click", () => {
  const next = model.inputMode === "observe" ? "steer" : "observe";
  if (model.engaged) client.send(handMessage([0.5, 0, 0.2], false));
  model = setInputMode(model, next);
  steerButton.textContent = `mode: ${next}`;
});

pauseButton.addEventListener("click", () => {
  paused = !paused;
  client.send({ type: paused ? "pause" : "resume" });
  pauseButton.textContent = paused ? "resume" : "pause";
});

resetButton.addEventListener("click", () => client.send({ type: "reset" }));

canvas.addEventListener("click", () => {
  if (model.status === "disconnected") client.connect();
});

function frame(): void {
  render(ctx, model, viewport(), performance.now());
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
