/**
 * Cockpit view model: the latest validated snapshot plus UI state. Pure
 * update functions so the whole thing is unit-testable without a DOM.
 */

import type { Snapshot } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";
export type InputMode = "observe" | "steer";
export type Plane = "top" | "side"; // top-down x-y, or side x-z

export const STALE_AFTER_MS = 1000;
export const TRAIL_LENGTH = 240;

export interface ViewModel {
  snapshot: Snapshot | null;
  receivedAt: number; // ms timestamp of the last accepted snapshot
  status: ConnectionStatus;
  inputMode: InputMode;
  plane: Plane;
  trail: [number, number, number][];
  engaged: boolean;
  heldCoord: number; // off-plane coordinate held at its last value
}

export function initialModel(): ViewModel {
  return {
    snapshot: null,
    receivedAt: 0,
    status: "connecting",
    inputMode: "observe",
    plane: "top",
    trail: [],
    engaged: false,
    heldCoord: 0.1,
  };
}

export function applySnapshot(m: ViewModel, snap: Snapshot, now: number): ViewModel {
  const trail = m.trail.concat([snap.ee]);
  if (trail.length > TRAIL_LENGTH) trail.splice(0, trail.length - TRAIL_LENGTH);
  return { ...m, snapshot: snap, receivedAt: now, trail };
}

export function setStatus(m: ViewModel, status: ConnectionStatus): ViewModel {
  return { ...m, status };
}

export function isStale(m: ViewModel, now: number): boolean {
  return m.snapshot !== null && now - m.receivedAt > STALE_AFTER_MS;
}

export function togglePlane(m: ViewModel): ViewModel {
  return { ...m, plane: m.plane === "top" ? "side" : "top" };
}

export function setInputMode(m: ViewModel, mode: InputMode): ViewModel {
  return { ...m, inputMode: mode, engaged: mode === "steer" ? m.engaged : false };
}

export function assembliesDone(snap: Snapshot): number {
  return snap.parts.filter((p) => p.assembled).length;
}

export function beliefEntries(snap: Snapshot): [string, number][] {
  // goals in id order, cooperate last
  const entries = Object.entries(snap.belief);
  const goals = entries.filter(([k]) => k.startsWith("goal_"))
    .sort((a, b) => a[0].localeCompare(b[0], undefined, { numeric: true }));
  const coop = entries.filter(([k]) => k === "cooperate");
  return goals.concat(coop) as [string, number][];
}
