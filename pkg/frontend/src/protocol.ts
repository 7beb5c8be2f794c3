/**
 * The bridge wire protocol: frame types, validation, and outbound
 * constructors. Everything the cockpit sends or accepts goes through
 * these checks, so a malformed server frame can never reach the renderer
 * and a malformed client frame can never leave.
 */

export interface PartView {
  region_id: number;
  aligned: boolean;
  assembled: boolean;
  misaligned: boolean;
}

export interface GoalView {
  id: number;
  center: [number, number, number];
  radius: number;
}

export interface Snapshot {
  type: "snapshot";
  t: number;
  mode: "COEXIST" | "APPROACH" | "GUIDED";
  belief: Record<string, number>;
  hand: [number, number, number];
  ee: [number, number, number];
  joints: number[];
  wrench: number[];
  parts: PartView[];
  goals: GoalView[];
}

export interface Hello {
  type: "hello";
  config_digest: string;
  dt: number;
}

export interface HandMessage {
  type: "hand";
  pos: [number, number, number];
  engaged: boolean;
}

export type ControlMessage = { type: "pause" | "resume" | "reset" };
export type OutboundMessage = HandMessage | ControlMessage;

export const WORKSPACE_BOX: [[number, number], [number, number], [number, number]] =
  [[-1, 1], [-1, 1], [0, 1]];

const MODES = new Set(["COEXIST", "APPROACH", "GUIDED"]);

function isVec3(x: unknown): x is [number, number, number] {
  return Array.isArray(x) && x.length === 3 &&
    x.every((v) => typeof v === "number" && Number.isFinite(v));
}

function isNumberArray(x: unknown): x is number[] {
  return Array.isArray(x) && x.every((v) => typeof v === "number" && Number.isFinite(v));
}

export function parseServerFrame(raw: string): Snapshot | Hello | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const msg = doc as Record<string, unknown>;
  if (msg.type === "hello") {
    if (typeof msg.config_digest === "string" && typeof msg.dt === "number") {
      return { type: "hello", config_digest: msg.config_digest, dt: msg.dt };
    }
    return null;
  }
  if (msg.type === "snapshot") return validateSnapshot(msg);
  return null; // error frames and unknown types are not renderable
}

export function validateSnapshot(msg: Record<string, unknown>): Snapshot | null {
  if (msg.type !== "snapshot") return null;
  if (typeof msg.t !== "number" || !Number.isFinite(msg.t)) return null;
  if (typeof msg.mode !== "string" || !MODES.has(msg.mode)) return null;
  if (!isVec3(msg.hand) || !isVec3(msg.ee)) return null;
  if (!isNumberArray(msg.joints) || !isNumberArray(msg.wrench)) return null;
  if (typeof msg.belief !== "object" || msg.belief === null) return null;
  const belief = msg.belief as Record<string, unknown>;
  for (const v of Object.values(belief)) {
    if (typeof v !== "number" || !Number.isFinite(v)) return null;
  }
  if (!Array.isArray(msg.parts) || !Array.isArray(msg.goals)) return null;
  for (const p of msg.parts) {
    if (typeof p !== "object" || p === null) return null;
    const part = p as Record<string, unknown>;
    if (typeof part.region_id !== "number" || typeof part.aligned !== "boolean" ||
        typeof part.assembled !== "boolean" || typeof part.misaligned !== "boolean") {
      return null;
    }
  }
  for (const g of msg.goals) {
    if (typeof g !== "object" || g === null) return null;
    const goal = g as Record<string, unknown>;
    if (typeof goal.id !== "number" || !isVec3(goal.center) ||
        typeof goal.radius !== "number") {
      return null;
    }
  }
  return msg as unknown as Snapshot;
}

/** Schema check mirroring the server's validate_client_msg. */
export function validateOutbound(msg: OutboundMessage): string | null {
  const keys = Object.keys(msg).sort();
  if (msg.type === "pause" || msg.type === "resume" || msg.type === "reset") {
    return keys.join(",") === "type" ? null : "control messages carry only 'type'";
  }
  if (msg.type === "hand") {
    if (keys.join(",") !== "engaged,pos,type") {
      return "hand message needs exactly: type, pos, engaged";
    }
    if (!isVec3(msg.pos)) return "pos must be 3 finite numbers";
    if (typeof msg.engaged !== "boolean") return "engaged must be a boolean";
    return null;
  }
  return "unknown message type";
}

export function clampToWorkspace(pos: [number, number, number]): [number, number, number] {
  return [
    Math.min(Math.max(pos[0], WORKSPACE_BOX[0][0]), WORKSPACE_BOX[0][1]),
    Math.min(Math.max(pos[1], WORKSPACE_BOX[1][0]), WORKSPACE_BOX[1][1]),
    Math.min(Math.max(pos[2], WORKSPACE_BOX[2][0]), WORKSPACE_BOX[2][1]),
  ];
}

export function handMessage(pos: [number, number, number], engaged: boolean): HandMessage {
  return { type: "hand", pos: clampToWorkspace(pos), engaged };
}
