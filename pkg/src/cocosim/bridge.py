"""Real-time session server.

Runs the same SimSession the offline runner uses, paced against the wall
clock, and speaks a small JSON-over-WebSocket protocol:

  server -> client
    {"type": "hello", "config_digest": "...", "dt": 0.01}   on connect
    {"type": "snapshot", "t": ..., "mode": ..., "belief": {...},
     "hand": [x,y,z], "ee": [x,y,z], "joints": [...], "wrench": [...],
     "parts": [...], "goals": [...]}                        at 30 Hz
    {"type": "error", "reason": "..."}                      on bad input

  client -> server
    {"type": "hand", "pos": [x,y,z], "engaged": true|false}
    {"type": "pause"} {"type": "resume"} {"type": "reset"}

While an override is engaged the scripted hand is bypassed: the override
position becomes the observation source (noise still applied) and the
script freezes until the operator lets go. The first client that sends an
input message owns the session's input; everyone else is view-only.
"""

from __future__ import annotations

import asyncio
import hashlib
import json
import time
from typing import Optional

import numpy as np

from .runner import ScenarioConfig, SimSession, config_to_dict

SNAPSHOT_HZ = 30.0
WORKSPACE_BOX = ((-1.0, 1.0), (-1.0, 1.0), (0.0, 1.0))


def config_digest(config: ScenarioConfig) -> str:
    doc = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()


def validate_client_msg(msg: dict) -> Optional[str]:
    """Return a rejection reason, or None when the message is valid."""
    if not isinstance(msg, dict) or "type" not in msg:
        return "message must be an object with a 'type'"
    kind = msg["type"]
    if kind in ("pause", "resume", "reset"):
        extra = set(msg) - {"type"}
        return f"unexpected fields {sorted(extra)}" if extra else None
    if kind == "hand":
        if set(msg) != {"type", "pos", "engaged"}:
            return "hand message needs exactly: type, pos, engaged"
        pos = msg["pos"]
        if (not isinstance(pos, list) or len(pos) != 3
                or not all(isinstance(x, (int, float)) for x in pos)
                or not all(np.isfinite(x) for x in pos)):
            return "pos must be 3 finite numbers"
        if not isinstance(msg["engaged"], bool):
            return "engaged must be a boolean"
        return None
    return f"unknown message type {kind!r}"


def _clamp_workspace(pos: np.ndarray) -> np.ndarray:
    lo = np.array([b[0] for b in WORKSPACE_BOX])
    hi = np.array([b[1] for b in WORKSPACE_BOX])
    return np.clip(pos, lo, hi)


class BridgeServer:
    """One simulation, many viewers, at most one operator."""

    def __init__(self, config: ScenarioConfig, port: int = 8765,
                 realtime: bool = True, loop_forever: bool = True):
        self.config = config
        self.port = port
        self.realtime = realtime
        self.loop_forever = loop_forever  # restart the scenario when it ends
        self.session = SimSession(config)
        self.paused = False
        self.override: Optional[np.ndarray] = None
        self.clients: set = set()
        self.controller = None          # the input-authoritative client
        self._server = None
        self._task = None
        self._last_snap_idx = -1

    # -- lifecycle ---------------------------------------------------------

    async def start(self) -> int:
        import websockets

        try:
            self._server = await websockets.serve(self._handle_client,
                                                  "127.0.0.1", self.port)
        except OSError as e:
            raise OSError(f"cannot bind port {self.port}: {e}") from e
        self.port = self._server.sockets[0].getsockname()[1]
        self._task = asyncio.create_task(self._loop())
        return self.port

    async def stop(self) -> None:
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    # -- session control --------------------------------------------------

    def pause(self) -> None:
        self.paused = True

    def resume(self) -> None:
        self.paused = False
        self._anchor()

    def reset(self) -> None:
        self.session = SimSession(self.config)
        self.override = None
        self._last_snap_idx = -1
        self._anchor()

    # -- simulation loop ----------------------------------------------------

    def _anchor(self) -> None:
        self._wall0 = time.monotonic()
        self._tick0 = self.session.tick

    async def _loop(self) -> None:
        self._anchor()
        dt = self.config.dt
        while True:
            if self.paused:
                await asyncio.sleep(0.02)
                self._anchor()
                continue
            if self.session.done:
                if not self.loop_forever:
                    await asyncio.sleep(0.02)
                    continue
                self.reset()
            if self.realtime:
                target = self._tick0 + (time.monotonic() - self._wall0) / dt
                behind = target - self.session.tick
                if behind < 1.0:
                    await asyncio.sleep(min(0.005, dt))
                    continue
                steps = min(int(behind), max(2, int(0.25 / dt)))
            else:
                steps = 50
            for _ in range(steps):
                if self.session.done:
                    break
                self._step_once()
            await asyncio.sleep(0)

    def _step_once(self) -> None:
        self.session.step(hand_override=self.override)
        idx = int(self.session.t * SNAPSHOT_HZ)
        if idx != self._last_snap_idx:
            self._last_snap_idx = idx
            self._broadcast(self.snapshot())

    # -- protocol ------------------------------------------------------------

    def snapshot(self) -> dict:
        rec = self.session.trace[-1] if self.session.trace else None
        goals = self.config.goals
        k = len(goals)
        if rec is None:
            belief = {f"goal_{g.id}": 1.0 / (k + 1) for g in goals}
            belief["cooperate"] = 1.0 / (k + 1)
            mode, hand, wrench = "COEXIST", list(self.session.world.hand), [0.0] * 3
            t = 0.0
        else:
            belief = {f"goal_{i}": rec.belief_probs[i] for i in range(k)}
            belief["cooperate"] = rec.belief_probs[k]
            mode, hand, wrench = rec.mode, rec.hand_obs, rec.wrench_force
            t = rec.t
        return {
            "type": "snapshot",
            "t": t,
            "mode": mode,
            "belief": belief,
            "hand": list(hand),
            "ee": [float(x) for x in self.session.ee],
            "joints": [float(x) for x in self.session.joints.q],
            "wrench": list(wrench) + [0.0, 0.0, 0.0],
            "parts": [{"region_id": p.region_id, "aligned": p.aligned,
                       "assembled": p.assembled,
                       "misaligned": p.misaligned_failure}
                      for p in self.session.world.parts],
            "goals": [{"id": g.id, "center": [float(x) for x in g.center],
                       "radius": g.radius} for g in goals],
        }

    def _broadcast(self, msg: dict) -> None:
        if not self.clients:
            return
        data = json.dumps(msg)
        for ws in list(self.clients):
            try:
                coro = ws.send(data)
            except Exception:
                self.clients.discard(ws)
                continue
            asyncio.ensure_future(self._send_safe(coro, ws))

    async def _send_safe(self, coro, ws) -> None:
        try:
            await coro
        except Exception:
            self.clients.discard(ws)
            if self.controller is ws:
                self.controller = None

    async def _handle_client(self, ws) -> None:
        self.clients.add(ws)
        try:
            await ws.send(json.dumps({"type": "hello",
                                      "config_digest": config_digest(self.config),
                                      "dt": self.config.dt}))
            async for raw in ws:
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send(json.dumps({"type": "error",
                                              "reason": "invalid JSON"}))
                    continue
                reason = validate_client_msg(msg)
                if reason is not None:
                    await ws.send(json.dumps({"type": "error", "reason": reason}))
                    continue
                if self.controller is None:
                    self.controller = ws
                if ws is not self.controller:
                    await ws.send(json.dumps({"type": "error",
                                              "reason": "another client controls this session"}))
                    continue
                self._apply(msg)
        finally:
            self.clients.discard(ws)
            if self.controller is ws:
                self.controller = None
                self.override = None

    def _apply(self, msg: dict) -> None:
        kind = msg["type"]
        if kind == "pause":
            self.pause()
        elif kind == "resume":
            self.resume()
        elif kind == "reset":
            self.reset()
        elif kind == "hand":
            if msg["engaged"]:
                self.override = _clamp_workspace(np.array(msg["pos"], dtype=float))
            else:
                self.override = None


async def serve(config: ScenarioConfig, port: int = 8765) -> None:
    """Run a session server until cancelled (the CLI `serve` command)."""
    server = BridgeServer(config, port=port)
    actual = await server.start()
    print(f"serving on ws://127.0.0.1:{actual} "
          f"(dt={config.dt}, {config.n_ticks} ticks/run)", flush=True)
    try:
        await asyncio.Future()
    finally:
        await server.stop()
