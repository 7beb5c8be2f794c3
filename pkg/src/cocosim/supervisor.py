"""Mode switch between coexistence and cooperation.

Three states: COEXIST (autonomous waypoint work with hand repulsion),
APPROACH (attract to the hand once cooperation intent is sustained) and
GUIDED (admittance control after intentional contact). Switching is driven
purely by the intention belief and the wrench; there is no manual mode
input. All raw commands pass through a speed cap and a per-axis
acceleration limiter, so the output stays continuous across switches.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import cooperate
from .coexist import (AssemblyStatus, CoexistParams, PlanPurpose, WaypointPlan,
                      coexist_command, monitor_assembly, plan_goal_waypoints,
                      plan_guided_waypoints, repulsive_velocity)
from .cooperate import AdmittanceParams, AdmittanceState
from .core import GuidanceFault, Twist, Wrench, saturate
from .intention import COOPERATE, GoalRegion, IntentionBelief


class Mode(enum.Enum):
    COEXIST = "COEXIST"
    APPROACH = "APPROACH"
    GUIDED = "GUIDED"


@dataclass(frozen=True)
class SwitchParams:
    p_on: float = 0.6    # cooperation prob that arms the switch
    p_off: float = 0.3   # dropping below this aborts an approach
    t_on: float = 0.3    # s the evidence must persist before approaching
    a_max: float = 1.0   # m/s^2 per-axis output rate limit

    def __post_init__(self):
        if not (0.0 < self.p_off < self.p_on < 1.0):
            raise ValueError("need 0 < p_off < p_on < 1")
        if self.t_on < 0 or self.a_max <= 0:
            raise ValueError("t_on must be >= 0 and a_max > 0")


@dataclass(frozen=True)
class Events:
    coop_sustained: bool = False
    coop_lost: bool = False
    contact: bool = False
    released: bool = False

    def __post_init__(self):
        if self.contact and self.released:
            raise ValueError("contact and released cannot both be true")


@dataclass(frozen=True)
class PushCompleted:
    """Emitted once when a push finishes, so the caller can commit it."""

    position: np.ndarray
    purpose: PlanPurpose
    goal_id: int | None


@dataclass
class SupervisorState:
    mode: Mode = Mode.COEXIST
    plan: Optional[WaypointPlan] = None     # None: idle, hold position
    assembly: AssemblyStatus = AssemblyStatus.IDLE
    adm: AdmittanceState = field(default_factory=cooperate.activate_guidance)
    coop_timer: float = 0.0
    last_cmd: Twist = field(default_factory=Twist.zero)
    assemblies_done: int = 0
    pending_push: Optional[PushCompleted] = None


def transition(mode: Mode, events: Events) -> Mode:
    """The four legal edges; anything else is identity."""
    if mode == Mode.COEXIST and events.coop_sustained:
        return Mode.APPROACH
    if mode == Mode.APPROACH and events.contact:
        return Mode.GUIDED
    if mode == Mode.APPROACH and events.coop_lost:
        return Mode.COEXIST
    if mode == Mode.GUIDED and events.released:
        return Mode.COEXIST
    return mode


def smooth(prev: Twist, cmd: Twist, a_max: float, dt: float) -> Twist:
    """Per-axis rate limit: move each component of prev toward cmd by at
    most a_max*dt. Commands already within reach pass through exactly."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    step = a_max * dt
    lin = prev.linear + np.clip(cmd.linear - prev.linear, -step, step)
    ang = prev.angular + np.clip(cmd.angular - prev.angular, -step, step)
    return Twist(lin, ang)


def _coexist_raw(s: SupervisorState, ee: np.ndarray, hand: np.ndarray,
                 wrench: Wrench, goals: list[GoalRegion],
                 belief: IntentionBelief, cp: CoexistParams,
                 goal_ready: Callable[[int], bool]) -> Twist:
    """Waypoint work plus replanning. With no plan the arm holds position
    but still evades the hand."""
    if s.plan is None:
        s.assembly = AssemblyStatus.IDLE
        if belief.mle != COOPERATE and goal_ready(belief.mle):
            s.plan = plan_goal_waypoints(goals[belief.mle], cp)
        else:
            return Twist.from_linear(repulsive_velocity(ee, hand, cp))

    cmd, s.plan = coexist_command(ee, hand, s.plan, cp)
    prev_status = s.assembly
    s.assembly = monitor_assembly(s.assembly, s.plan, ee, wrench, cp)
    if s.assembly == AssemblyStatus.FINISHED and prev_status != AssemblyStatus.FINISHED:
        s.assemblies_done += 1
        s.pending_push = PushCompleted(position=s.plan.push_waypoint.copy(),
                                       purpose=s.plan.purpose,
                                       goal_id=s.plan.goal_id)
        if s.plan.index == s.plan.push_index:
            # force threshold fired mid-press: abandon the rest of the press
            s.plan = s.plan.advanced()
            cmd, s.plan = coexist_command(ee, hand, s.plan, cp)

    if s.plan.exhausted and s.assembly == AssemblyStatus.FINISHED:
        if belief.mle != COOPERATE and goal_ready(belief.mle):
            s.plan = plan_goal_waypoints(goals[belief.mle], cp)
            s.assembly = AssemblyStatus.IDLE
            cmd, s.plan = coexist_command(ee, hand, s.plan, cp)
        else:
            s.plan = None
            return Twist.from_linear(repulsive_velocity(ee, hand, cp))
    return cmd


def supervise_step(s: SupervisorState, belief: IntentionBelief,
                   ee: np.ndarray, hand: np.ndarray, wrench: Wrench,
                   goals: list[GoalRegion], cp: CoexistParams,
                   ap: AdmittanceParams, sp: SwitchParams, dt: float,
                   goal_ready: Callable[[int], bool] = lambda gid: True,
                   ) -> tuple[SupervisorState, Twist]:
    """One supervisory tick: update hysteresis, switch mode, run the active
    controller, then saturate and rate-limit the output.

    goal_ready reports whether a region still holds a part worth pushing;
    the caller owns that knowledge.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    ee = np.asarray(ee, dtype=np.float64)
    hand = np.asarray(hand, dtype=np.float64)
    s.pending_push = None

    # 1. hysteresis timers and events
    if belief.cooperation_prob >= sp.p_on:
        s.coop_timer += dt
    else:
        s.coop_timer = 0.0
    contact = cooperate.detect_contact(wrench, ap)
    events = Events(
        coop_sustained=s.coop_timer >= sp.t_on,
        coop_lost=belief.cooperation_prob < sp.p_off,
        contact=contact,
        released=(not contact) and cooperate.guidance_finished(s.adm, ap),
    )

    # 2. mode transition with entry/exit side effects
    new_mode = transition(s.mode, events)
    if new_mode != s.mode:
        if s.mode == Mode.APPROACH and new_mode == Mode.GUIDED:
            s.adm = cooperate.activate_guidance()
        if s.mode == Mode.GUIDED and new_mode == Mode.COEXIST:
            s.plan = plan_guided_waypoints(ee, cp)
            s.assembly = AssemblyStatus.IDLE
        s.coop_timer = 0.0
        s.mode = new_mode

    # 3. raw command by mode
    if s.mode == Mode.COEXIST:
        raw = _coexist_raw(s, ee, hand, wrench, goals, belief, cp, goal_ready)
    elif s.mode == Mode.APPROACH:
        raw = cooperate.approach_velocity(ee, hand, ap)
    else:
        try:
            s.adm, raw = cooperate.admittance_step(s.adm, wrench, dt, ap)
        except GuidanceFault:
            s.mode = Mode.COEXIST
            s.plan = None
            s.assembly = AssemblyStatus.IDLE
            raw = Twist.zero()

    # 4. saturate, then smooth against the previous output
    raw = saturate(raw, cp.v_max, 0.0)
    out = smooth(s.last_cmd, raw, sp.a_max, dt)
    s.last_cmd = out
    return s, out
