"""Scenario configuration, the fixed-timestep closed loop, trace logging
and metrics.

Loop per tick: world -> intention filter -> supervisor -> differential IK
-> joint integration -> forward kinematics. Everything downstream of the
seed is deterministic, so a config run twice produces byte-identical
traces. Trace floats are quantized to 9 significant digits at record time
so replayed metrics match online metrics exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import world as world_mod
from .coexist import CoexistParams, PlanPurpose
from .cooperate import AdmittanceParams
from .core import ConfigError, ControllerFault, Rng, Twist, Wrench
from .intention import (FilterParams, GoalRegion, init_filter, label_name,
                        step_filter)
from .kinematics import (ArmModel, JointState, fk_position, ik_dls, integrate,
                         twist_vector)
from .supervisor import Mode, SupervisorState, SwitchParams, supervise_step
from .world import (AlignPart, Dwell, Guide, HumanScript, MoveTo, RecoverPart,
                    ReachForEE, Release, WaitFor, WorldState, commit_assembly,
                    init_world, world_step)

TOP_LEVEL_KEYS = ("seed", "dt", "duration", "goals", "arm", "filter",
                  "coexist", "admittance", "switch", "script",
                  "failure_injections")


def _round9(x: float) -> float:
    return float(format(float(x), ".9g"))


def _round9_list(xs) -> list:
    return [_round9(x) for x in xs]


def _fmt9(x: float) -> str:
    return format(float(x), ".9g")


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    dt: float
    duration: float
    goals: list
    arm: ArmModel
    filter: FilterParams
    coexist: CoexistParams
    admittance: AdmittanceParams
    switch: SwitchParams
    script: HumanScript
    failure_injections: list

    def __post_init__(self):
        if self.dt <= 0 or self.duration <= 0:
            raise ConfigError("dt and duration must be > 0")
        if self.duration / self.dt > 1e7:
            raise ConfigError("duration/dt exceeds 1e7 ticks")
        self.admittance.check_stability(self.dt)

    @property
    def n_ticks(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass(frozen=True)
class TraceRecord:
    t: float
    mode: str
    mle_label: str
    cooperation_prob: float
    belief_probs: list
    hand_obs: list
    ee_position: list
    wrench_force: list
    command: list
    assemblies_done: int
    parts_assembled: list
    parts_aligned: list
    parts_misaligned: list
    fault: Optional[str] = None


@dataclass
class Metrics:
    assemblies_completed: int = 0
    completion_time: Optional[float] = None
    min_hand_ee_distance_in_coexist: Optional[float] = None
    mode_switch_count: int = 0
    switch_latency: Optional[float] = None
    failure_recoveries: int = 0
    fault: Optional[str] = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# ---------------------------------------------------------------------------
# config parsing


def _require_keys(obj: dict, allowed: tuple, where: str) -> None:
    unknown = [k for k in obj if k not in allowed]
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {where}")


def _parse_vec3(v, where: str) -> np.ndarray:
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise ConfigError(f"{where} must be a 3-element array")
    return np.array([float(x) for x in v])


def _parse_goals(raw) -> list:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("goals must be a non-empty array")
    goals = []
    seen = set()
    for g in raw:
        _require_keys(g, ("id", "center", "radius"), "goal")
        gid = int(g["id"])
        if gid in seen:
            raise ConfigError("goal ids must be unique")
        seen.add(gid)
        goals.append(GoalRegion(id=gid, center=_parse_vec3(g["center"], "goal center"),
                                radius=float(g["radius"])))
    if sorted(seen) != list(range(len(goals))):
        raise ConfigError("goal ids must be contiguous from 0")
    return sorted(goals, key=lambda g: g.id)


def _parse_params(cls, raw: dict | None, where: str):
    raw = dict(raw or {})
    fields = tuple(cls.__dataclass_fields__)
    _require_keys(raw, fields, where)
    try:
        return cls(**raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {where} block: {e}") from e


def _parse_arm(raw: dict | None) -> ArmModel:
    raw = dict(raw or {})
    _require_keys(raw, ("dh_rows", "q_min", "q_max", "qd_max", "ik_damping",
                        "q_home"), "arm")
    kwargs = {}
    if "dh_rows" in raw:
        rows = tuple(tuple(float(x) for x in row) for row in raw["dh_rows"])
        if any(len(r) != 4 for r in rows):
            raise ConfigError("each dh row is (a, alpha, d, theta_offset)")
        kwargs["dh_rows"] = rows
    n = len(kwargs.get("dh_rows", ArmModel().dh_rows))
    for key in ("q_min", "q_max", "q_home"):
        if key in raw:
            arr = np.array([float(x) for x in raw[key]])
            if arr.shape != (n,):
                raise ConfigError(f"arm.{key} must have {n} entries")
            kwargs[key] = arr
    if "qd_max" in raw:
        kwargs["qd_max"] = float(raw["qd_max"])
    if "ik_damping" in raw:
        kwargs["ik_damping"] = float(raw["ik_damping"])
    try:
        return ArmModel(**kwargs)
    except ValueError as e:
        raise ConfigError(f"invalid arm block: {e}") from e


_PHASE_KINDS = {
    "move_to": (MoveTo, ("target", "speed")),
    "align_part": (AlignPart, ("region_id", "duration")),
    "recover_part": (RecoverPart, ("region_id", "duration")),
    "reach_for_ee": (ReachForEE, ("speed",)),
    "guide": (Guide, ("path", "speed")),
    "release": (Release, ("duration",)),
    "dwell": (Dwell, ("duration",)),
}


def _parse_phase(raw: dict, goals: list) -> world_mod.HumanPhase:
    if "kind" not in raw:
        raise ConfigError("phase needs a 'kind'")
    kind = raw["kind"]
    if kind not in _PHASE_KINDS:
        raise ConfigError(f"unknown phase kind {kind!r}")
    cls, keys = _PHASE_KINDS[kind]
    _require_keys(raw, ("kind", "wait_for") + keys, f"{kind} phase")
    kwargs = {}
    for key in keys:
        if key not in raw:
            raise ConfigError(f"{kind} phase missing {key!r}")
        val = raw[key]
        if key == "target":
            val = _parse_vec3(val, f"{kind}.target")
        elif key == "path":
            val = tuple(_parse_vec3(p, f"{kind}.path") for p in val)
        elif key == "region_id":
            val = int(val)
            if val not in {g.id for g in goals}:
                raise ConfigError(f"{kind} phase references unknown region {val}")
        else:
            val = float(val)
        kwargs[key] = val
    if "wait_for" in raw and raw["wait_for"] is not None:
        wf = raw["wait_for"]
        _require_keys(wf, ("kind", "region_id"), "wait_for")
        kwargs["wait_for"] = WaitFor(kind=wf["kind"], region_id=int(wf["region_id"]))
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {kind} phase: {e}") from e


def _parse_script(raw: dict | None, goals: list) -> HumanScript:
    if raw is None:
        raise ConfigError("config requires a script block")
    raw = dict(raw)
    _require_keys(raw, ("phases", "hand_start", "hand_noise_sigma",
                        "grasp_radius", "grasp_stiffness", "grasp_force_max"),
                  "script")
    if "phases" not in raw or not raw["phases"]:
        raise ConfigError("script.phases must be a non-empty array")
    phases = tuple(_parse_phase(p, goals) for p in raw["phases"])
    kwargs = {"phases": phases}
    if "hand_start" in raw:
        kwargs["hand_start"] = _parse_vec3(raw["hand_start"], "script.hand_start")
    for key in ("hand_noise_sigma", "grasp_radius", "grasp_stiffness",
                "grasp_force_max"):
        if key in raw:
            kwargs[key] = float(raw[key])
    try:
        return HumanScript(**kwargs)
    except ValueError as e:
        raise ConfigError(f"invalid script block: {e}") from e


def parse_config(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(doc, TOP_LEVEL_KEYS, "config")
    if "goals" not in doc:
        raise ConfigError("config requires goals")
    goals = _parse_goals(doc["goals"])
    script = _parse_script(doc.get("script"), goals)
    injections = [int(x) for x in doc.get("failure_injections", [])]
    for rid in injections:
        if rid not in {g.id for g in goals}:
            raise ConfigError(f"failure injection references unknown region {rid}")
    return ScenarioConfig(
        seed=int(doc.get("seed", 0)),
        dt=float(doc.get("dt", 0.01)),
        duration=float(doc.get("duration", 60.0)),
        goals=goals,
        arm=_parse_arm(doc.get("arm")),
        filter=_parse_params(FilterParams, doc.get("filter"), "filter"),
        coexist=_parse_params(CoexistParams, doc.get("coexist"), "coexist"),
        admittance=_parse_params(AdmittanceParams, doc.get("admittance"),
                                 "admittance"),
        switch=_parse_params(SwitchParams, doc.get("switch"), "switch"),
        script=script,
        failure_injections=injections,
    )


def _phase_to_dict(phase) -> dict:
    kind = {MoveTo: "move_to", AlignPart: "align_part",
            RecoverPart: "recover_part", ReachForEE: "reach_for_ee",
            Guide: "guide", Release: "release", Dwell: "dwell"}[type(phase)]
    out = {"kind": kind}
    for key in _PHASE_KINDS[kind][1]:
        val = getattr(phase, key)
        if key == "target":
            val = [float(x) for x in val]
        elif key == "path":
            val = [[float(x) for x in p] for p in val]
        elif key == "region_id":
            val = int(val)
        else:
            val = float(val)
        out[key] = val
    if phase.wait_for is not None:
        out["wait_for"] = {"kind": phase.wait_for.kind,
                           "region_id": phase.wait_for.region_id}
    return out


def config_to_dict(config: ScenarioConfig) -> dict:
    """Round-trippable plain-dict form of a validated config."""
    return {
        "seed": config.seed,
        "dt": config.dt,
        "duration": config.duration,
        "goals": [{"id": g.id, "center": [float(x) for x in g.center],
                   "radius": g.radius} for g in config.goals],
        "arm": {
            "dh_rows": [list(r) for r in config.arm.dh_rows],
            "q_min": [float(x) for x in config.arm.q_min],
            "q_max": [float(x) for x in config.arm.q_max],
            "qd_max": config.arm.qd_max,
            "ik_damping": config.arm.ik_damping,
            "q_home": [float(x) for x in config.arm.q_home],
        },
        "filter": {k: getattr(config.filter, k)
                   for k in FilterParams.__dataclass_fields__},
        "coexist": {k: getattr(config.coexist, k)
                    for k in CoexistParams.__dataclass_fields__},
        "admittance": {k: getattr(config.admittance, k)
                       for k in AdmittanceParams.__dataclass_fields__},
        "switch": {k: getattr(config.switch, k)
                   for k in SwitchParams.__dataclass_fields__},
        "script": {
            "phases": [_phase_to_dict(p) for p in config.script.phases],
            "hand_start": [float(x) for x in config.script.hand_start],
            "hand_noise_sigma": config.script.hand_noise_sigma,
            "grasp_radius": config.script.grasp_radius,
            "grasp_stiffness": config.script.grasp_stiffness,
            "grasp_force_max": config.script.grasp_force_max,
        },
        "failure_injections": list(config.failure_injections),
    }


def load_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document (UTF-8 JSON)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"parse error at line {e.lineno}, column {e.colno}: "
                          f"{e.msg}") from e
    return parse_config(doc)


def load_config_file(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as f:
        return load_config(f.read())


# ---------------------------------------------------------------------------
# the closed loop


class SimSession:
    """Owns all simulation state and advances it one fixed tick at a time.

    The runner drives it in a plain loop; the realtime bridge drives the
    same object paced by the wall clock, so both produce identical state
    sequences for a given config."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.tick = 0
        self.world: WorldState = init_world(config.goals, config.script,
                                            config.failure_injections)
        self.filter = init_filter(config.goals, config.filter, config.seed)
        self.sup = SupervisorState()
        self.joints = JointState.at(config.arm.q_home)
        self.ee = fk_position(config.arm, self.joints.q)
        self.rng_world = Rng(config.seed, stream=0)
        self.trace: list[TraceRecord] = []
        self.fault: Optional[str] = None

    @property
    def t(self) -> float:
        return self.tick * self.config.dt

    @property
    def done(self) -> bool:
        return self.fault is not None or self.tick >= self.config.n_ticks

    def _goal_ready(self, gid: int) -> bool:
        """A region is worth pushing while a part pair is present, the robot
        has not already pushed there, and nothing is assembled yet. A
        silently failed push therefore never gets retried autonomously."""
        part = self.world.parts[gid]
        return part.placed and not part.pushed and not part.assembled

    def step(self, hand_override: np.ndarray | None = None) -> TraceRecord:
        cfg = self.config
        ee_before = self.ee
        try:
            self.world, hand_obs, wrench = world_step(
                self.world, cfg.script, ee_before, cfg.dt, self.rng_world,
                hand_override=hand_override)
            self.filter, belief = step_filter(self.filter, hand_obs,
                                              ee_before, cfg.dt)
            self.sup, cmd = supervise_step(
                self.sup, belief, ee_before, hand_obs, wrench, cfg.goals,
                cfg.coexist, cfg.admittance, cfg.switch, cfg.dt,
                goal_ready=self._goal_ready)
            if self.sup.pending_push is not None:
                self._commit(self.sup.pending_push)
            qd = ik_dls(cfg.arm, self.joints.q,
                        twist_vector(cmd.linear, cmd.angular))
            self.joints = integrate(cfg.arm, self.joints, qd, cfg.dt)
            self.ee = fk_position(cfg.arm, self.joints.q)
        except ControllerFault as e:
            self.fault = str(e)
            record = self._record(ee_before, self.world.hand, Wrench.zero(),
                                  Twist.zero(), None, fault=self.fault)
            self.trace.append(record)
            return record

        record = self._record(ee_before, hand_obs, wrench, cmd, belief)
        self.trace.append(record)
        self.tick += 1
        return record

    def _commit(self, push) -> None:
        rid = push.goal_id
        if push.purpose == PlanPurpose.GUIDED_ASSEMBLY:
            rid = self._region_at(push.position)
        if rid is not None:
            self.world = commit_assembly(self.world, push.position, rid)

    def _region_at(self, pos: np.ndarray) -> Optional[int]:
        for g in self.config.goals:
            if float(np.hypot(pos[0] - g.center[0], pos[1] - g.center[1])) <= g.radius:
                return g.id
        return None

    def _record(self, ee, hand_obs, wrench: Wrench, cmd: Twist, belief,
                fault: Optional[str] = None) -> TraceRecord:
        if belief is None:
            probs = [0.0] * (len(self.config.goals) + 1)
            mle, coop = "goal_0", 0.0
        else:
            probs = _round9_list(belief.probs)
            mle = label_name(belief.mle)
            coop = _round9(belief.cooperation_prob)
        return TraceRecord(
            t=_round9(self.t),
            mode=self.sup.mode.value,
            mle_label=mle,
            cooperation_prob=coop,
            belief_probs=probs,
            hand_obs=_round9_list(hand_obs),
            ee_position=_round9_list(ee),
            wrench_force=_round9_list(wrench.force),
            command=_round9_list(cmd.linear),
            assemblies_done=self.sup.assemblies_done,
            parts_assembled=[p.assembled for p in self.world.parts],
            parts_aligned=[p.aligned for p in self.world.parts],
            parts_misaligned=[p.misaligned_failure for p in self.world.parts],
            fault=fault,
        )

    def run(self) -> tuple[list[TraceRecord], Metrics]:
        while not self.done:
            self.step()
        metrics = compute_metrics(self.trace, p_on=self.config.switch.p_on)
        metrics.fault = self.fault
        return self.trace, metrics


def run_scenario(config: ScenarioConfig) -> tuple[list[TraceRecord], Metrics]:
    """Execute duration/dt ticks of the closed loop."""
    return SimSession(config).run()


# ---------------------------------------------------------------------------
# metrics and trace files


def compute_metrics(trace: list[TraceRecord], p_on: float = 0.6) -> Metrics:
    if not trace:
        raise ValueError("empty trace")
    m = Metrics()
    last = trace[-1]
    m.assemblies_completed = sum(last.parts_assembled)
    m.fault = last.fault

    for rec in trace:
        if all(rec.parts_assembled):
            m.completion_time = rec.t
            break

    min_d = None
    for rec in trace:
        if rec.mode != Mode.COEXIST.value:
            continue
        d = float(np.linalg.norm(np.array(rec.hand_obs) - np.array(rec.ee_position)))
        if min_d is None or d < min_d:
            min_d = d
    m.min_hand_ee_distance_in_coexist = None if min_d is None else _round9(min_d)

    m.mode_switch_count = sum(
        1 for a, b in zip(trace, trace[1:]) if a.mode != b.mode)

    first_guided = next((i for i, r in enumerate(trace)
                         if r.mode == Mode.GUIDED.value), None)
    if first_guided is not None:
        onset = first_guided
        while onset > 0 and trace[onset - 1].cooperation_prob >= p_on:
            onset -= 1
        m.switch_latency = _round9(trace[first_guided].t - trace[onset].t)

    ever_misaligned = set()
    recovered = set()
    for rec in trace:
        for i, bad in enumerate(rec.parts_misaligned):
            if bad:
                ever_misaligned.add(i)
        for i, done in enumerate(rec.parts_assembled):
            if done and i in ever_misaligned:
                recovered.add(i)
    m.failure_recoveries = len(recovered)
    return m


def record_to_json(rec: TraceRecord) -> str:
    """One JSONL line; floats carry 9 significant digits."""
    parts = [
        f'"t":{_fmt9(rec.t)}',
        f'"mode":"{rec.mode}"',
        f'"mle_label":"{rec.mle_label}"',
        f'"cooperation_prob":{_fmt9(rec.cooperation_prob)}',
        '"belief_probs":[' + ",".join(_fmt9(x) for x in rec.belief_probs) + "]",
        '"hand_obs":[' + ",".join(_fmt9(x) for x in rec.hand_obs) + "]",
        '"ee_position":[' + ",".join(_fmt9(x) for x in rec.ee_position) + "]",
        '"wrench_force":[' + ",".join(_fmt9(x) for x in rec.wrench_force) + "]",
        '"command":[' + ",".join(_fmt9(x) for x in rec.command) + "]",
        f'"assemblies_done":{rec.assemblies_done}',
        '"parts_assembled":[' + ",".join("true" if b else "false"
                                         for b in rec.parts_assembled) + "]",
        '"parts_aligned":[' + ",".join("true" if b else "false"
                                       for b in rec.parts_aligned) + "]",
        '"parts_misaligned":[' + ",".join("true" if b else "false"
                                          for b in rec.parts_misaligned) + "]",
    ]
    if rec.fault is not None:
        parts.append(f'"fault":{json.dumps(rec.fault)}')
    return "{" + ",".join(parts) + "}"


def write_trace(trace: list[TraceRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in trace:
            f.write(record_to_json(rec))
            f.write("\n")


def read_trace(path: str) -> list[TraceRecord]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            out.append(TraceRecord(
                t=doc["t"], mode=doc["mode"], mle_label=doc["mle_label"],
                cooperation_prob=doc["cooperation_prob"],
                belief_probs=doc["belief_probs"], hand_obs=doc["hand_obs"],
                ee_position=doc["ee_position"],
                wrench_force=doc["wrench_force"], command=doc["command"],
                assemblies_done=doc["assemblies_done"],
                parts_assembled=doc["parts_assembled"],
                parts_aligned=doc["parts_aligned"],
                parts_misaligned=doc["parts_misaligned"],
                fault=doc.get("fault")))
    return out
