"""Coexistence mode: waypoint-following assembly actions with a repulsive
velocity field around the human hand, and wrench-threshold monitoring of
the push.

The field is the classic attract/repulse sum: a proportional pull toward
the current waypoint plus a FIRAS-form push away from the hand inside the
influence distance d0. Repulsion is suppressed while the push waypoint is
active so a nearby human cannot corrupt a committed press.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace

import numpy as np

from .core import ConfigError, Twist, Wrench, clamp_norm, norm3, vec3
from .intention import GoalRegion

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoexistParams:
    k_att: float = 1.5          # 1/s proportional gain toward waypoint
    k_rep: float = 0.02         # repulsive gain (FIRAS form)
    d0: float = 0.35            # m, influence distance of the hand
    v_max: float = 0.25         # m/s command cap
    waypoint_tol: float = 0.01  # m, waypoint arrival tolerance
    hover_height: float = 0.12  # m above the region center
    push_depth: float = 0.02    # m below the part top
    f_done: float = 8.0         # N, |force.z| that completes a push

    def __post_init__(self):
        vals = (self.k_att, self.d0, self.v_max, self.waypoint_tol,
                self.hover_height, self.push_depth, self.f_done)
        if any(v <= 0 for v in vals):
            raise ConfigError("coexist parameters must all be positive")
        if self.k_rep < 0:  # zero disables repulsion (ablation hook)
            raise ConfigError("k_rep must be >= 0")
        if self.d0 <= self.waypoint_tol:
            raise ConfigError("d0 must exceed waypoint_tol")


class PlanPurpose(enum.Enum):
    GOAL_ASSEMBLY = "goal_assembly"
    GUIDED_ASSEMBLY = "guided_assembly"


@dataclass(frozen=True)
class WaypointPlan:
    """Ordered Cartesian targets realizing one assembly action."""

    waypoints: tuple
    index: int
    purpose: PlanPurpose
    goal_id: int | None = None
    push_index: int = 1

    def __post_init__(self):
        if not (0 <= self.index <= len(self.waypoints)):
            raise ValueError("plan index out of range")
        if len(self.waypoints) < 1:
            raise ValueError("plan needs at least one waypoint")

    @property
    def exhausted(self) -> bool:
        return self.index >= len(self.waypoints)

    @property
    def current(self) -> np.ndarray:
        return self.waypoints[self.index]

    @property
    def push_waypoint(self) -> np.ndarray:
        return self.waypoints[self.push_index]

    def advanced(self) -> "WaypointPlan":
        return replace(self, index=self.index + 1)


class AssemblyStatus(enum.Enum):
    IDLE = "idle"
    PUSHING = "pushing"
    FINISHED = "finished"


def plan_goal_waypoints(goal: GoalRegion, params: CoexistParams) -> WaypointPlan:
    """hover above the region, press below the part top, retreat to hover."""
    hover = goal.center + vec3(0, 0, params.hover_height)
    push = goal.center - vec3(0, 0, params.push_depth)
    return WaypointPlan(waypoints=(hover, push, hover.copy()), index=0,
                        purpose=PlanPurpose.GOAL_ASSEMBLY, goal_id=goal.id,
                        push_index=1)


def plan_guided_waypoints(ee: np.ndarray, params: CoexistParams) -> WaypointPlan:
    """Push straight down from where guidance ended, then retract to the
    release pose."""
    ee = np.asarray(ee, dtype=np.float64)
    push = ee - vec3(0, 0, params.push_depth + params.hover_height)
    return WaypointPlan(waypoints=(push, ee.copy()), index=0,
                        purpose=PlanPurpose.GUIDED_ASSEMBLY, goal_id=None,
                        push_index=0)


def attractive_velocity(ee: np.ndarray, subgoal: np.ndarray,
                        params: CoexistParams) -> np.ndarray:
    return clamp_norm(params.k_att * (subgoal - ee), params.v_max)


def repulsive_velocity(ee: np.ndarray, hand: np.ndarray,
                       params: CoexistParams) -> np.ndarray:
    """FIRAS-form gradient pointing away from the hand, zero at and beyond
    the influence distance. Inside a 1 um ball the direction is undefined;
    escape straight up at v_max and log a proximity fault."""
    away = ee - hand
    d = norm3(away)
    if d >= params.d0:
        return np.zeros(3)
    if d < 1e-6:
        log.warning("proximity fault: hand within %g m of end-effector", d)
        return vec3(0, 0, params.v_max)
    mag = params.k_rep * (1.0 / d - 1.0 / params.d0) / (d * d)
    return (mag / d) * away


def coexist_command(ee: np.ndarray, hand: np.ndarray, plan: WaypointPlan,
                    params: CoexistParams) -> tuple[Twist, WaypointPlan]:
    """Sum of attraction toward the active waypoint and repulsion from the
    hand, saturated to v_max. Arrival within waypoint_tol advances the plan
    (at most one step per call) before the command is computed. An
    exhausted plan yields a zero command."""
    ee = np.asarray(ee, dtype=np.float64)
    if plan.exhausted:
        return Twist.zero(), plan
    if norm3(ee - plan.current) < params.waypoint_tol:
        plan = plan.advanced()
        if plan.exhausted:
            return Twist.zero(), plan
    v = attractive_velocity(ee, plan.current, params)
    if plan.index != plan.push_index:  # committed press ignores the hand
        v = v + repulsive_velocity(ee, hand, params)
    return Twist.from_linear(clamp_norm(v, params.v_max)), plan


def monitor_assembly(status: AssemblyStatus, plan: WaypointPlan,
                     ee: np.ndarray, wrench: Wrench,
                     params: CoexistParams) -> AssemblyStatus:
    """Completion (not success) detector for the push: Idle -> Pushing when
    the push waypoint becomes active, Pushing -> Finished on the force
    threshold or on reaching the push depth. Finished holds until a new
    plan is installed."""
    if status == AssemblyStatus.FINISHED:
        return status
    if status == AssemblyStatus.IDLE:
        if not plan.exhausted and plan.index == plan.push_index:
            status = AssemblyStatus.PUSHING
        else:
            return status
    # status is PUSHING here
    if abs(float(wrench.force[2])) >= params.f_done:
        return AssemblyStatus.FINISHED
    if plan.index > plan.push_index or plan.exhausted:
        return AssemblyStatus.FINISHED
    if norm3(np.asarray(ee) - plan.push_waypoint) < params.waypoint_tol:
        return AssemblyStatus.FINISHED
    return AssemblyStatus.PUSHING
