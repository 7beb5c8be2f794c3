from __future__ import annotations

import asyncio
import json

import numpy as np
import pytest

from cocosim.bridge import BridgeServer, config_digest, validate_client_msg
from cocosim.runner import parse_config, run_scenario, write_trace

SMALL = {
    "seed": 4,
    "dt": 0.01,
    "duration": 2.0,
    "goals": [{"id": 0, "center": [0.5, 0.2, 0.02], "radius": 0.06}],
    "script": {"phases": [
        {"kind": "move_to", "target": [0.5, 0.2, 0.02], "speed": 0.3},
        {"kind": "dwell", "duration": 5.0},
    ]},
}


def small_config(duration=2.0):
    return parse_config({**SMALL, "duration": duration})


class TestMessageValidation:
    def test_valid_messages(self):
        assert validate_client_msg({"type": "pause"}) is None
        assert validate_client_msg({"type": "resume"}) is None
        assert validate_client_msg({"type": "reset"}) is None
        assert validate_client_msg({"type": "hand", "pos": [0.1, 0.2, 0.3],
                                    "engaged": True}) is None

    def test_rejects_unknown_type(self):
        assert validate_client_msg({"type": "warp"}) is not None

    def test_rejects_bad_pos(self):
        assert validate_client_msg({"type": "hand", "pos": [1, 2],
                                    "engaged": True}) is not None
        assert validate_client_msg({"type": "hand", "pos": [1, 2, "x"],
                                    "engaged": True}) is not None
        assert validate_client_msg({"type": "hand", "pos": [1, 2, float("nan")],
                                    "engaged": True}) is not None

    def test_rejects_non_bool_engaged(self):
        assert validate_client_msg({"type": "hand", "pos": [0, 0, 0],
                                    "engaged": 1}) is not None

    def test_rejects_extra_fields(self):
        assert validate_client_msg({"type": "pause", "x": 1}) is not None


class TestHeadlessParity:
    def test_bridge_trace_identical_to_runner(self, tmp_path):
        # same SimSession stepping: a clientless bridge run equals the runner
        cfg = small_config()
        server = BridgeServer(cfg, realtime=False, loop_forever=False)
        while not server.session.done:
            server._step_once()
        trace_runner, _ = run_scenario(small_config())
        a, b = tmp_path / "bridge.jsonl", tmp_path / "runner.jsonl"
        write_trace(server.session.trace, a)
        write_trace(trace_runner, b)
        assert a.read_bytes() == b.read_bytes()

    def test_digest_stable_and_seed_sensitive(self):
        assert config_digest(small_config()) == config_digest(small_config())
        other = parse_config({**SMALL, "seed": 5})
        assert config_digest(small_config()) != config_digest(other)

    def test_reset_first_snapshot_equals_fresh_run(self):
        fresh = BridgeServer(small_config(), realtime=False, loop_forever=False)
        fresh._step_once()
        first = fresh.snapshot()

        used = BridgeServer(small_config(), realtime=False, loop_forever=False)
        for _ in range(150):
            used._step_once()
        used.reset()
        used._step_once()
        assert used.snapshot() == first


async def _connect(port):
    import websockets

    ws = await websockets.connect(f"ws://127.0.0.1:{port}")
    hello = json.loads(await ws.recv())
    return ws, hello


async def _recv_type(ws, kind, timeout=5.0):
    while True:
        msg = json.loads(await asyncio.wait_for(ws.recv(), timeout))
        if msg["type"] == kind:
            return msg


async def _latest_snapshot(ws, frames=12):
    """Step past any queued frames; return a recent snapshot. Bounded so a
    steady 30 Hz stream cannot pin the drain loop."""
    snap = await _recv_type(ws, "snapshot")
    for _ in range(frames):
        try:
            msg = json.loads(await asyncio.wait_for(ws.recv(), 0.05))
        except asyncio.TimeoutError:
            break
        if msg["type"] == "snapshot":
            snap = msg
    return snap


class TestLiveServer:
    def test_hello_and_snapshots(self):
        async def scenario():
            server = BridgeServer(small_config(duration=60.0), port=0)
            port = await server.start()
            try:
                ws, hello = await _connect(port)
                assert hello["type"] == "hello"
                assert hello["dt"] == 0.01
                assert hello["config_digest"] == config_digest(server.config)
                snaps = [await _recv_type(ws, "snapshot") for _ in range(10)]
                ts = [s["t"] for s in snaps]
                assert ts == sorted(ts)
                s = snaps[-1]
                assert s["mode"] in ("COEXIST", "APPROACH", "GUIDED")
                assert len(s["ee"]) == 3 and len(s["joints"]) == 6
                assert len(s["wrench"]) == 6
                assert set(s["belief"]) == {"goal_0", "cooperate"}
                assert s["goals"][0]["radius"] == 0.06
                await ws.close()
            finally:
                await server.stop()

        asyncio.run(scenario())

    def test_snapshot_rate_near_30hz(self):
        async def scenario():
            server = BridgeServer(small_config(duration=60.0), port=0)
            port = await server.start()
            try:
                ws, _ = await _connect(port)
                t0 = asyncio.get_event_loop().time()
                n = 0
                while asyncio.get_event_loop().time() - t0 < 2.0:
                    msg = json.loads(await asyncio.wait_for(ws.recv(), 5))
                    if msg["type"] == "snapshot":
                        n += 1
                await ws.close()
                return n
            finally:
                await server.stop()

        n = asyncio.run(scenario())
        assert 0.8 * 60 <= n <= 1.2 * 60  # 30 Hz for 2 s within 20%

    def test_malformed_message_keeps_session(self):
        async def scenario():
            server = BridgeServer(small_config(duration=60.0), port=0)
            port = await server.start()
            try:
                ws, _ = await _connect(port)
                await ws.send("not json")
                err = await _recv_type(ws, "error")
                assert "JSON" in err["reason"]
                await ws.send(json.dumps({"type": "warp"}))
                err = await _recv_type(ws, "error")
                assert "unknown" in err["reason"]
                # still alive: snapshots keep flowing
                await _recv_type(ws, "snapshot")
                await ws.close()
            finally:
                await server.stop()

        asyncio.run(scenario())

    def test_pause_resume_reset(self):
        async def scenario():
            server = BridgeServer(small_config(duration=60.0), port=0)
            port = await server.start()
            try:
                ws, _ = await _connect(port)
                first = await _recv_type(ws, "snapshot")
                await ws.send(json.dumps({"type": "pause"}))
                await asyncio.sleep(0.1)
                t_pause = server.session.t
                await asyncio.sleep(0.3)
                assert server.session.t == t_pause  # frozen while paused
                await ws.send(json.dumps({"type": "resume"}))
                await _recv_type(ws, "snapshot")
                assert server.session.t >= t_pause
                await asyncio.sleep(1.0)  # run well past the restart window
                t_resumed = server.session.t
                await ws.send(json.dumps({"type": "reset"}))
                await asyncio.sleep(0.2)
                assert server.session.t < t_resumed  # restarted from tick 0
                snap = await _latest_snapshot(ws)
                assert snap["t"] <= first["t"] + 1.5  # near the beginning again
                await ws.close()
            finally:
                await server.stop()

        asyncio.run(scenario())

    def test_hand_override_bypasses_script(self):
        async def scenario():
            cfg = parse_config({**SMALL, "duration": 60.0,
                                "script": {"phases": [{"kind": "dwell",
                                                       "duration": 60.0}],
                                           "hand_noise_sigma": 0.0}})
            server = BridgeServer(cfg, port=0)
            port = await server.start()
            try:
                ws, _ = await _connect(port)
                target = [0.61, 0.11, 0.21]
                await ws.send(json.dumps({"type": "hand", "pos": target,
                                          "engaged": True}))
                await asyncio.sleep(0.2)
                snap = await _latest_snapshot(ws)
                assert np.allclose(snap["hand"], target, atol=1e-9)
                await ws.send(json.dumps({"type": "hand", "pos": target,
                                          "engaged": False}))
                await asyncio.sleep(0.2)
                snap = await _latest_snapshot(ws)
                # script resumed: the dwell holds the scripted hand position
                assert np.allclose(snap["hand"], cfg.script.hand_start,
                                   atol=1e-9)
                await ws.close()
            finally:
                await server.stop()

        asyncio.run(scenario())

    def test_second_client_is_view_only(self):
        async def scenario():
            server = BridgeServer(small_config(duration=60.0), port=0)
            port = await server.start()
            try:
                ws1, _ = await _connect(port)
                ws2, _ = await _connect(port)
                await ws1.send(json.dumps({"type": "pause"}))
                await asyncio.sleep(0.1)
                await ws2.send(json.dumps({"type": "resume"}))
                err = await _recv_type(ws2, "error")
                assert "controls" in err["reason"]
                assert server.paused  # second client could not resume
                await ws1.close()
                await ws2.close()
            finally:
                await server.stop()

        asyncio.run(scenario())

    def test_busy_port_raises(self):
        async def scenario():
            a = BridgeServer(small_config(), port=0)
            port = await a.start()
            b = BridgeServer(small_config(), port=port)
            with pytest.raises(OSError):
                await b.start()
            await a.stop()

        asyncio.run(scenario())


class TestOverrideGuidanceParity:
    def test_operator_drag_reaches_guided(self):
        """Steering the override hand onto the EE and pulling drives the
        mode to GUIDED, matching the scripted reach-and-guide equivalent."""
        cfg = parse_config({
            "seed": 4, "dt": 0.01, "duration": 120.0,
            "goals": [{"id": 0, "center": [0.5, 0.2, 0.02], "radius": 0.06}],
            "script": {"phases": [{"kind": "dwell", "duration": 120.0}],
                       "hand_noise_sigma": 0.0,
                       "grasp_stiffness": 120.0},
        })
        server = BridgeServer(cfg, realtime=False, loop_forever=False)
        seen = set()
        hand = np.array(cfg.script.hand_start, dtype=float)
        for _ in range(6000):
            mode = server.session.sup.mode.value
            seen.add(mode)
            if mode == "GUIDED":
                break
            ee = server.session.ee
            if mode == "COEXIST":
                # walk the marker toward the arm like a human would
                d = ee - hand
                dist = np.linalg.norm(d)
                step = min(0.15 * cfg.dt, dist)
                hand = hand + (step / max(dist, 1e-12)) * d
            else:
                # APPROACH: grab slightly above the tool; the stretched
                # grasp spring produces the intentional-contact force
                hand = ee + [0, 0, 0.03]
            server.override = hand.copy()
            server._step_once()
        # once guided, drag sideways: compliant motion should follow
        assert seen >= {"COEXIST", "APPROACH", "GUIDED"}
        start = server.session.ee.copy()
        for k in range(400):
            server.override = server.session.ee + [0.03, 0, 0.005]
            server._step_once()
        assert server.session.sup.mode.value == "GUIDED"
        assert server.session.ee[0] > start[0] + 0.05  # it moved with the pull
