from __future__ import annotations

import json

import pytest

from cocosim.cli import main
from cocosim.runner import Metrics, read_trace

SMALL = {
    "seed": 4,
    "dt": 0.01,
    "duration": 2.0,
    "goals": [{"id": 0, "center": [0.5, 0.2, 0.02], "radius": 0.06}],
    "script": {"phases": [{"kind": "dwell", "duration": 1.0}]},
}


@pytest.fixture
def config_path(tmp_path):
    p = tmp_path / "small.json"
    p.write_text(json.dumps(SMALL))
    return str(p)


class TestRunCommand:
    def test_run_writes_trace_and_metrics(self, config_path, tmp_path, capsys):
        out = tmp_path / "trace.jsonl"
        rc = main(["run", config_path, "--out", str(out)])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["assemblies_completed"] == 0
        assert len(read_trace(out)) == 200

    def test_quiet_suppresses_output(self, config_path, capsys):
        rc = main(["run", config_path, "--quiet"])
        assert rc == 0
        assert capsys.readouterr().out == ""

    def test_seed_override_changes_trace(self, config_path, tmp_path):
        a, b, c = (tmp_path / n for n in ("a.jsonl", "b.jsonl", "c.jsonl"))
        main(["run", config_path, "--out", str(a), "--quiet"])
        main(["run", config_path, "--out", str(b), "--quiet", "--seed", "99"])
        main(["run", config_path, "--out", str(c), "--quiet", "--seed", "99"])
        assert a.read_bytes() != b.read_bytes()
        assert b.read_bytes() == c.read_bytes()

    def test_config_error_exit_1(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({**SMALL, "bogus": 1}))
        assert main(["run", str(p)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_file_exit_1(self, capsys):
        assert main(["run", "/nonexistent/config.json"]) == 1

    def test_controller_fault_exit_2(self, config_path, monkeypatch, capsys):
        import cocosim.cli as cli_mod

        def fake_run(config):
            return [], Metrics(fault="injected fault")

        monkeypatch.setattr(cli_mod, "run_scenario", fake_run)
        assert main(["run", config_path]) == 2


class TestMetricsCommand:
    def test_metrics_from_trace(self, config_path, tmp_path, capsys):
        out = tmp_path / "trace.jsonl"
        main(["run", config_path, "--out", str(out), "--quiet"])
        rc = main(["metrics", str(out)])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["mode_switch_count"] == 0
        assert doc["fault"] is None
