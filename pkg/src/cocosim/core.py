"""Geometry, time and randomness primitives shared by every controller.

Conventions: right-handed world frame, z up. Assembly pushes act along -z.
3-vectors are float64 numpy arrays of shape (3,); treat them as read-only
values once handed to another module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    """A scenario or parameter block violates a documented invariant."""


class ControllerFault(RuntimeError):
    """A controller received input it cannot act on (non-finite, singular)."""


class GuidanceFault(ControllerFault):
    """Admittance control received a corrupt wrench; guidance must abort."""


def vec3(x: float = 0.0, y: float = 0.0, z: float = 0.0) -> np.ndarray:
    return np.array([x, y, z], dtype=np.float64)


def norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def norm3(v) -> float:
    """Euclidean norm of a 3-vector (faster than np.linalg.norm here)."""
    return math.hypot(float(v[0]), float(v[1]), float(v[2]))


def is_finite(v: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(v)))


@dataclass(frozen=True)
class Pose:
    """Position plus unit quaternion (w, x, y, z)."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.orientation, dtype=np.float64)
        if abs(norm(q) - 1.0) > 1e-9:
            raise ValueError("orientation quaternion must have unit norm")


@dataclass(frozen=True)
class Twist:
    """Cartesian end-effector velocity command: linear m/s, angular rad/s."""

    linear: np.ndarray
    angular: np.ndarray

    @staticmethod
    def zero() -> "Twist":
        return Twist(vec3(), vec3())

    @staticmethod
    def from_linear(v: np.ndarray) -> "Twist":
        return Twist(np.asarray(v, dtype=np.float64), vec3())


@dataclass(frozen=True)
class Wrench:
    """Force-torque reading: force N, torque N*m."""

    force: np.ndarray
    torque: np.ndarray

    @staticmethod
    def zero() -> "Wrench":
        return Wrench(vec3(), vec3())


@dataclass(frozen=True)
class SimClock:
    """Fixed-step simulation time. t is always ticks * dt."""

    dt: float
    ticks: int = 0

    @property
    def t(self) -> float:
        return self.ticks * self.dt

    def advance(self) -> "SimClock":
        return SimClock(self.dt, self.ticks + 1)


class Rng:
    """Deterministic random stream (Philox counter-based generator).

    Equal (seed, stream) pairs always produce equal draw sequences; the
    stream index lets one scenario seed derive independent generators for
    the world and the intention filter.
    """

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        self.seed = int(seed)
        self.stream = int(stream)
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream: int) -> "Rng":
        return Rng(self.seed, stream)

    def normal3(self) -> np.ndarray:
        return self._gen.standard_normal(3)

    def uniform(self) -> float:
        return float(self._gen.random())

    def uniforms(self, n: int) -> np.ndarray:
        return self._gen.random(n)

    def integers(self, low: int, high: int, size=None):
        return self._gen.integers(low, high, size=size)


def gaussian3(rng: Rng, sigma: float) -> np.ndarray:
    """Zero-mean isotropic normal 3-vector with per-axis std sigma."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    return sigma * rng.normal3()


def clamp_norm(v: np.ndarray, cap: float) -> np.ndarray:
    """Scale v down to norm <= cap, preserving direction. Exact fixed point:
    re-applying never changes the result again."""
    n = norm3(v)
    if n <= cap:
        return v
    out = v * (cap / n)
    # one float rescale can land a few ulp above the cap; iterate to exactness
    n = norm3(out)
    while n > cap:
        out = out * (cap / n)
        n = norm3(out)
    return out


def saturate(v: Twist, v_max: float, w_max: float) -> Twist:
    """Clamp a twist to the configured speed caps (safety stage on every
    emitted command). Inputs below the caps pass through unchanged."""
    if v_max <= 0 or w_max < 0:
        raise ValueError("v_max must be > 0 and w_max >= 0")
    if not (is_finite(v.linear) and is_finite(v.angular)):
        raise ControllerFault("non-finite twist")
    return Twist(clamp_norm(v.linear, v_max), clamp_norm(v.angular, w_max))
