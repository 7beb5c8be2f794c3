/**
 * Screen <-> workspace coordinate mapping for the two steering planes.
 * The visible workspace window is fixed, so a given viewport always maps
 * the same way (deterministic rendering and steering).
 */

import type { Plane } from "./model.js";

// workspace window shown on the canvas, chosen around the table layout
export const VIEW = {
  top: { h: [-0.1, 1.0], v: [-0.55, 0.55] },   // x right, y up(screen) -> left table side
  side: { h: [-0.1, 1.0], v: [-0.05, 0.60] },  // x right, z up
} as const;

export interface Viewport {
  width: number;
  height: number;
}

export function workspaceToScreen(
  plane: Plane, p: [number, number, number], vp: Viewport,
): [number, number] {
  const win = VIEW[plane];
  const h = p[0];
  const v = plane === "top" ? p[1] : p[2];
  const sx = ((h - win.h[0]) / (win.h[1] - win.h[0])) * vp.width;
  const sy = vp.height - ((v - win.v[0]) / (win.v[1] - win.v[0])) * vp.height;
  return [sx, sy];
}

/**
 * Map a pointer position back into the workspace on the selected plane.
 * The off-plane coordinate is held at `held` (the marker's last value).
 */
export function screenToWorkspace(
  plane: Plane, sx: number, sy: number, vp: Viewport, held: number,
): [number, number, number] {
  const win = VIEW[plane];
  const h = win.h[0] + (sx / vp.width) * (win.h[1] - win.h[0]);
  const v = win.v[0] + ((vp.height - sy) / vp.height) * (win.v[1] - win.v[0]);
  return plane === "top" ? [h, v, held] : [h, held, v];
}

/** Radius in pixels of a workspace-sized circle (horizontal scale). */
export function scaleLength(plane: Plane, r: number, vp: Viewport): number {
  const win = VIEW[plane];
  return (r / (win.h[1] - win.h[0])) * vp.width;
}

/** Rate limiter for outbound hand messages (<= maxHz, trailing send). */
export class Throttle {
  private last = -Infinity;
  private readonly interval: number;

  constructor(maxHz: number) {
    this.interval = 1000 / maxHz;
  }

  ready(now: number): boolean {
    if (now - this.last >= this.interval) {
      this.last = now;
      return true;
    }
    return false;
  }
}
