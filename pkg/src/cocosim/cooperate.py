"""Cooperation mode: approach the human hand, detect intentional contact,
then render mass-damper admittance so the human can drag the end-effector.

Guidance ends on sustained zero contact; a deadband below f_release plus a
dwell timer keeps sensor noise from chattering the release."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (ConfigError, GuidanceFault, Twist, Wrench, clamp_norm,
                   is_finite, norm3)


@dataclass(frozen=True)
class AdmittanceParams:
    mass: float = 2.0           # kg, per axis
    damping: float = 10.0       # N*s/m, per axis
    f_contact: float = 2.0      # N, contact detection threshold
    f_release: float = 0.5      # N, below this counts as zero contact
    t_release: float = 0.4      # s of sustained zero contact to end guidance
    approach_gain: float = 1.0  # 1/s pull toward the hand
    approach_vmax: float = 0.15 # m/s approach speed cap

    def __post_init__(self):
        if self.mass <= 0 or self.damping <= 0:
            raise ConfigError("mass and damping must be > 0")
        if not (0 < self.f_release < self.f_contact):
            raise ConfigError("need 0 < f_release < f_contact")
        if self.t_release <= 0:
            raise ConfigError("t_release must be > 0")
        if self.approach_gain <= 0 or self.approach_vmax <= 0:
            raise ConfigError("approach gain and cap must be > 0")

    def check_stability(self, dt: float) -> None:
        """Explicit Euler on M v' = F - D v diverges unless dt*D/M < 1."""
        if dt * self.damping / self.mass >= 1.0:
            raise ConfigError(
                f"admittance unstable: dt*damping/mass = "
                f"{dt * self.damping / self.mass:.3f} >= 1")


@dataclass(frozen=True)
class AdmittanceState:
    v: np.ndarray                   # m/s compliant velocity
    zero_contact_elapsed: float     # s spent inside the force deadband


def approach_velocity(ee: np.ndarray, hand: np.ndarray,
                      params: AdmittanceParams) -> Twist:
    """Pure attraction toward the hand (no repulsion), speed-capped."""
    v = params.approach_gain * (np.asarray(hand) - np.asarray(ee))
    return Twist.from_linear(clamp_norm(v, params.approach_vmax))


def detect_contact(wrench: Wrench, params: AdmittanceParams) -> bool:
    return norm3(wrench.force) >= params.f_contact


def activate_guidance() -> AdmittanceState:
    """Entering guidance zeroes the command and starts a fresh dwell timer."""
    return AdmittanceState(v=np.zeros(3), zero_contact_elapsed=0.0)


def admittance_step(state: AdmittanceState, wrench: Wrench, dt: float,
                    params: AdmittanceParams) -> tuple[AdmittanceState, Twist]:
    """One Euler step of M v' = F - D v per axis.

    Forces below f_release are treated as zero and accumulate the
    zero-contact timer; anything above resets it."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if not is_finite(wrench.force):
        raise GuidanceFault("non-finite wrench during guidance")
    f = wrench.force
    if norm3(f) < params.f_release:
        f = np.zeros(3)
        elapsed = state.zero_contact_elapsed + dt
    else:
        elapsed = 0.0
    v = state.v + dt * (f - params.damping * state.v) / params.mass
    new = AdmittanceState(v=v, zero_contact_elapsed=elapsed)
    return new, Twist.from_linear(v.copy())


def guidance_finished(state: AdmittanceState, params: AdmittanceParams) -> bool:
    return state.zero_contact_elapsed >= params.t_release
