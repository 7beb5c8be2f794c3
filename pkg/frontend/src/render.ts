/**
 * Canvas rendering. Drawing is a pure function of (view model, viewport,
 * stale flag): the same inputs always produce the same draw calls, which
 * the tests verify with a recording context.
 */

import { assembliesDone, beliefEntries, isStale, ViewModel } from "./model.js";
import { scaleLength, Viewport, workspaceToScreen } from "./mapping.js";

/** The subset of CanvasRenderingContext2D the cockpit uses. */
export interface Canvas2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  textAlign: CanvasTextAlign;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

const MODE_COLORS: Record<string, string> = {
  COEXIST: "#2d7dd2",
  APPROACH: "#f2a541",
  GUIDED: "#37b24d",
};

function partColor(aligned: boolean, assembled: boolean, misaligned: boolean): string {
  if (assembled) return "#37b24d";
  if (misaligned) return "#e03131";
  if (aligned) return "#f2a541";
  return "#adb5bd";
}

export function render(ctx: Canvas2D, m: ViewModel, vp: Viewport, now: number): void {
  ctx.globalAlpha = 1;
  ctx.fillStyle = "#101418";
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.fillRect(0, 0, vp.width, vp.height);

  if (m.snapshot === null) {
    overlay(ctx, vp, m.status === "disconnected"
      ? "disconnected - click to reconnect"
      : "waiting for snapshots...");
    return;
  }
  const snap = m.snapshot;

  // goal regions with part state
  for (const goal of snap.goals) {
    const [gx, gy] = workspaceToScreen(m.plane, goal.center, vp);
    const r = scaleLength(m.plane, goal.radius, vp);
    const part = snap.parts.find((p) => p.region_id === goal.id);
    ctx.beginPath();
    ctx.arc(gx, gy, r, 0, 2 * Math.PI);
    ctx.strokeStyle = "#5c677d";
    ctx.lineWidth = 1.5;
    ctx.stroke();
    if (part) {
      ctx.beginPath();
      ctx.arc(gx, gy, r * 0.55, 0, 2 * Math.PI);
      ctx.fillStyle = partColor(part.aligned, part.assembled, part.misaligned);
      ctx.fill();
      if (part.misaligned) {
        // failure glyph: cross through the part
        ctx.strokeStyle = "#ffffff";
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(gx - r * 0.4, gy - r * 0.4);
        ctx.lineTo(gx + r * 0.4, gy + r * 0.4);
        ctx.moveTo(gx - r * 0.4, gy + r * 0.4);
        ctx.lineTo(gx + r * 0.4, gy - r * 0.4);
        ctx.stroke();
      }
    }
    ctx.fillStyle = "#8d99ae";
    ctx.font = "11px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(`R${goal.id}`, gx, gy - r - 5);
  }

  // end-effector trail
  if (m.trail.length > 1) {
    ctx.beginPath();
    const [x0, y0] = workspaceToScreen(m.plane, m.trail[0], vp);
    ctx.moveTo(x0, y0);
    for (const p of m.trail.slice(1)) {
      const [x, y] = workspaceToScreen(m.plane, p, vp);
      ctx.lineTo(x, y);
    }
    ctx.strokeStyle = "#4cc9f0";
    ctx.globalAlpha = 0.4;
    ctx.lineWidth = 1;
    ctx.stroke();
    ctx.globalAlpha = 1;
  }

  // end-effector and hand markers
  const [ex, ey] = workspaceToScreen(m.plane, snap.ee, vp);
  ctx.beginPath();
  ctx.arc(ex, ey, 7, 0, 2 * Math.PI);
  ctx.fillStyle = "#4cc9f0";
  ctx.fill();
  const [hx, hy] = workspaceToScreen(m.plane, snap.hand, vp);
  ctx.beginPath();
  ctx.arc(hx, hy, 6, 0, 2 * Math.PI);
  ctx.fillStyle = m.engaged ? "#ff6b6b" : "#ffd166";
  ctx.fill();

  // mode badge
  ctx.fillStyle = MODE_COLORS[snap.mode] ?? "#868e96";
  ctx.fillRect(10, 10, 110, 26);
  ctx.fillStyle = "#ffffff";
  ctx.font = "bold 13px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(snap.mode, 65, 28);

  // belief bars, goals in order then cooperate
  const entries = beliefEntries(snap);
  const barW = 52;
  entries.forEach(([label, prob], i) => {
    const x = 10 + i * (barW + 8);
    const y = vp.height - 18;
    const h = prob * 60;
    ctx.fillStyle = label === "cooperate" ? "#37b24d" : "#2d7dd2";
    ctx.fillRect(x, y - h, barW, h);
    ctx.strokeStyle = "#5c677d";
    ctx.lineWidth = 1;
    ctx.strokeRect(x, y - 60, barW, 60);
    ctx.fillStyle = "#ced4da";
    ctx.font = "10px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(`${label} ${(prob * 100).toFixed(0)}%`, x + barW / 2, y + 12);
  });

  // wrench gauge (force norm)
  const f = Math.hypot(snap.wrench[0] ?? 0, snap.wrench[1] ?? 0, snap.wrench[2] ?? 0);
  const gx0 = vp.width - 130;
  ctx.fillStyle = "#343a40";
  ctx.fillRect(gx0, 10, 110, 12);
  ctx.fillStyle = f >= 8 ? "#e03131" : "#f2a541";
  ctx.fillRect(gx0, 10, Math.min(f / 15, 1) * 110, 12);
  ctx.fillStyle = "#ced4da";
  ctx.font = "10px sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(`|F| ${f.toFixed(1)} N`, gx0, 34);

  // counters and UI state
  ctx.fillStyle = "#ced4da";
  ctx.font = "12px sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(`assembled ${assembliesDone(snap)}/${snap.parts.length}`, 10, 54);
  ctx.fillText(`t ${snap.t.toFixed(2)} s`, 10, 70);
  ctx.fillText(`plane ${m.plane === "top" ? "top-down x-y" : "side x-z"}`, 10, 86);
  ctx.fillText(`mode ${m.inputMode}`, 10, 102);

  if (isStale(m, now)) {
    ctx.fillStyle = "#e03131";
    ctx.font = "bold 13px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("STALE DATA", vp.width / 2, 20);
  }
  if (m.status === "disconnected") {
    overlay(ctx, vp, "disconnected - click to reconnect");
  }
}

function overlay(ctx: Canvas2D, vp: Viewport, text: string): void {
  ctx.globalAlpha = 0.75;
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, vp.height / 2 - 30, vp.width, 60);
  ctx.globalAlpha = 1;
  ctx.fillStyle = "#ffd166";
  ctx.font = "bold 15px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(text, vp.width / 2, vp.height / 2 + 5);
}
