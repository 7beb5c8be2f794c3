"""Simulated environment: part/fixture regions, a scripted human, and
synthesized contact forces standing in for a physical force-torque sensor
and a camera pipeline.

The human is a sequence of phases (move, align, recover, reach, guide,
release, dwell). Guidance force is a clamped spring between the hand and
the end-effector that engages once the hand first comes within grasp
radius during a guide phase. Misaligned parts offer no push resistance, so
a failed assembly is invisible to the robot's wrench monitoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .core import ConfigError, Rng, Wrench, gaussian3, norm3, vec3
from .intention import GoalRegion

_ARRIVE_EPS = 1e-9
_TIME_EPS = 1e-9       # dt accumulation: N steps of dt must satisfy N*dt
_REACH_TOL = 0.02       # m, hand-to-EE distance that completes a reach
_GUIDE_SETTLE_FRAC = 0.2  # guide ends when EE trails by < this * grasp_radius


@dataclass(frozen=True)
class WaitFor:
    """Phase guard: hold the hand until a region is pushed or assembled."""

    kind: str   # "pushed" | "assembled"
    region_id: int

    def __post_init__(self):
        if self.kind not in ("pushed", "assembled"):
            raise ConfigError(f"unknown wait_for kind {self.kind!r}")


@dataclass(frozen=True)
class MoveTo:
    target: np.ndarray
    speed: float
    wait_for: Optional[WaitFor] = None


@dataclass(frozen=True)
class AlignPart:
    region_id: int
    duration: float
    wait_for: Optional[WaitFor] = None


@dataclass(frozen=True)
class RecoverPart:
    region_id: int
    duration: float
    wait_for: Optional[WaitFor] = None


@dataclass(frozen=True)
class ReachForEE:
    speed: float
    wait_for: Optional[WaitFor] = None


@dataclass(frozen=True)
class Guide:
    path: tuple
    speed: float
    wait_for: Optional[WaitFor] = None


@dataclass(frozen=True)
class Release:
    duration: float
    wait_for: Optional[WaitFor] = None


@dataclass(frozen=True)
class Dwell:
    duration: float
    wait_for: Optional[WaitFor] = None


HumanPhase = Union[MoveTo, AlignPart, RecoverPart, ReachForEE, Guide,
                   Release, Dwell]


@dataclass(frozen=True)
class HumanScript:
    phases: tuple
    hand_start: np.ndarray = field(default_factory=lambda: vec3(0.45, 0.45, 0.10))
    hand_noise_sigma: float = 0.003
    grasp_radius: float = 0.05
    grasp_stiffness: float = 60.0
    grasp_force_max: float = 15.0

    def __post_init__(self):
        if not self.phases:
            raise ConfigError("human script needs at least one phase")
        if self.hand_noise_sigma < 0:
            raise ConfigError("hand_noise_sigma must be >= 0")
        for ph in self.phases:
            speed = getattr(ph, "speed", None)
            if speed is not None and speed <= 0:
                raise ConfigError("phase speeds must be > 0")
            duration = getattr(ph, "duration", None)
            if duration is not None and duration < 0:
                raise ConfigError("phase durations must be >= 0")


@dataclass
class PartState:
    region_id: int
    aligned: bool = False
    assembled: bool = False
    misaligned_failure: bool = False
    pushed: bool = False    # the robot completed a push here (its own record)

    @property
    def placed(self) -> bool:
        """A part pair is present, whether or not the alignment is good.
        This is all the robot can observe."""
        return self.aligned or self.misaligned_failure


@dataclass
class WorldState:
    hand: np.ndarray
    parts: list[PartState]
    goals: list[GoalRegion]
    phase_index: int = 0
    phase_elapsed: float = 0.0
    guide_vertex: int = 0
    grasp_latched: bool = False
    env_stiffness: float = 4000.0
    part_top_z: dict = field(default_factory=dict)
    pending_failures: list = field(default_factory=list)


def init_world(goals: list[GoalRegion], script: HumanScript,
               failure_injections: list[int] | None = None,
               env_stiffness: float = 4000.0) -> WorldState:
    failure_injections = list(failure_injections or [])
    ids = {g.id for g in goals}
    for rid in failure_injections:
        if rid not in ids:
            raise ConfigError(f"failure injection references unknown region {rid}")
    parts = [PartState(region_id=g.id) for g in sorted(goals, key=lambda g: g.id)]
    top = {g.id: float(g.center[2]) for g in goals}
    return WorldState(hand=script.hand_start.copy(), parts=parts,
                      goals=sorted(goals, key=lambda g: g.id),
                      env_stiffness=env_stiffness, part_top_z=top,
                      pending_failures=failure_injections)


def _move_toward(pos: np.ndarray, target: np.ndarray, speed: float,
                 dt: float) -> np.ndarray:
    d = target - pos
    dist = norm3(d)
    step = speed * dt
    if dist <= step + _ARRIVE_EPS:
        return target.copy()
    return pos + (step / dist) * d


def _wait_satisfied(w: WorldState, cond: Optional[WaitFor]) -> bool:
    if cond is None:
        return True
    part = w.parts[cond.region_id]
    return part.pushed if cond.kind == "pushed" else part.assembled


def _complete_alignment(w: WorldState, region_id: int, recovering: bool) -> None:
    part = w.parts[region_id]
    if not recovering and region_id in w.pending_failures:
        w.pending_failures.remove(region_id)
        part.misaligned_failure = True
        part.aligned = False
    else:
        part.aligned = True
        part.misaligned_failure = False


def environment_force(w: WorldState, ee: np.ndarray) -> Wrench:
    """Vertical spring resistance when the EE presses into an aligned part;
    misaligned or empty regions push back with nothing (air)."""
    ee = np.asarray(ee, dtype=np.float64)
    for g in w.goals:
        part = w.parts[g.id]
        if not part.aligned or part.misaligned_failure:
            continue
        top = w.part_top_z[g.id]
        if ee[2] >= top:
            continue
        if math.hypot(ee[0] - g.center[0], ee[1] - g.center[1]) <= g.radius:
            return Wrench(vec3(0, 0, w.env_stiffness * (top - ee[2])), vec3())
    return Wrench.zero()


def _grasp_force(w: WorldState, script: HumanScript, anchor: np.ndarray,
                 ee: np.ndarray) -> np.ndarray:
    """Clamped spring pulling the EE toward the human's hand."""
    d = anchor - ee
    dist = norm3(d)
    if dist < 1e-12:
        return np.zeros(3)
    mag = min(script.grasp_stiffness * dist, script.grasp_force_max)
    return (mag / dist) * d


def world_step(w: WorldState, script: HumanScript, ee: np.ndarray, dt: float,
               rng: Rng, hand_override: np.ndarray | None = None,
               ) -> tuple[WorldState, np.ndarray, Wrench]:
    """Advance the scripted human one tick and synthesize observations.

    Returns (world, hand observation, wrench). With a hand override the
    script freezes, the override position replaces the observation source,
    and the operator can latch a grasp by touching the EE.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    ee = np.asarray(ee, dtype=np.float64)
    grasp = np.zeros(3)

    if hand_override is not None:
        eff_hand = np.asarray(hand_override, dtype=np.float64)
        if not w.grasp_latched and norm3(eff_hand - ee) <= script.grasp_radius:
            w.grasp_latched = True
        if w.grasp_latched:
            grasp = _grasp_force(w, script, eff_hand, ee)
    else:
        if w.phase_index < len(script.phases):
            phase = script.phases[w.phase_index]
            if _wait_satisfied(w, phase.wait_for):
                _run_phase(w, script, phase, ee, dt)
        eff_hand = w.hand
        if w.grasp_latched:
            grasp = _grasp_force(w, script, eff_hand, ee)

    wrench_env = environment_force(w, ee)
    wrench = Wrench(wrench_env.force + grasp, vec3())
    hand_obs = eff_hand + gaussian3(rng, script.hand_noise_sigma)
    return w, hand_obs, wrench


def _advance_phase(w: WorldState) -> None:
    w.phase_index += 1
    w.phase_elapsed = 0.0
    w.guide_vertex = 0
    w.grasp_latched = False


def _run_phase(w: WorldState, script: HumanScript, phase: HumanPhase,
               ee: np.ndarray, dt: float) -> None:
    if isinstance(phase, MoveTo):
        w.hand = _move_toward(w.hand, np.asarray(phase.target), phase.speed, dt)
        if np.allclose(w.hand, phase.target, atol=_ARRIVE_EPS):
            _advance_phase(w)
    elif isinstance(phase, (AlignPart, RecoverPart)):
        w.phase_elapsed += dt
        if w.phase_elapsed >= phase.duration - _TIME_EPS:
            _complete_alignment(w, phase.region_id,
                                recovering=isinstance(phase, RecoverPart))
            _advance_phase(w)
    elif isinstance(phase, ReachForEE):
        w.hand = _move_toward(w.hand, ee, phase.speed, dt)
        if norm3(w.hand - ee) <= _REACH_TOL:
            _advance_phase(w)
    elif isinstance(phase, Guide):
        if not w.grasp_latched and norm3(w.hand - ee) <= script.grasp_radius:
            w.grasp_latched = True
        target = np.asarray(phase.path[w.guide_vertex])
        w.hand = _move_toward(w.hand, target, phase.speed, dt)
        if np.allclose(w.hand, target, atol=_ARRIVE_EPS):
            if w.guide_vertex + 1 < len(phase.path):
                w.guide_vertex += 1
            elif norm3(w.hand - ee) <= _GUIDE_SETTLE_FRAC * script.grasp_radius:
                # hold the grasp until the robot settles at the last vertex
                _advance_phase(w)
    elif isinstance(phase, (Release, Dwell)):
        w.phase_elapsed += dt
        if w.phase_elapsed >= phase.duration - _TIME_EPS:
            _advance_phase(w)
    else:  # pragma: no cover
        raise ConfigError(f"unknown phase type {type(phase).__name__}")


def commit_assembly(w: WorldState, ee: np.ndarray, region_id: int) -> WorldState:
    """Record a completed push. The part assembles only if it was truly
    aligned; a misaligned part fails silently (only the scripted human can
    notice). Idempotent for already assembled parts."""
    if not any(p.region_id == region_id for p in w.parts):
        raise ConfigError(f"unknown region {region_id}")
    part = w.parts[region_id]
    part.pushed = True
    if part.aligned and not part.misaligned_failure:
        part.assembled = True
    return w
