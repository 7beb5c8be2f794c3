"""Serial-arm kinematics: DH forward kinematics, geometric Jacobian,
damped-least-squares differential IK and joint-space integration.

The default arm is a generic 6R chain with roughly 0.8 m reach; any chain
with the same joint count works through the same pipeline. Only linear
velocity is commanded in this project; the angular rows are carried so the
Jacobian math stays complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ControllerFault, Pose


def dh_transform(a: float, alpha: float, d: float, theta: float) -> np.ndarray:
    """Standard (distal) Denavit-Hartenberg link transform.

    T = Rz(theta) Tz(d) Tx(a) Rx(alpha)
    """
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    T = np.empty((4, 4))
    T[0, 0] = ct; T[0, 1] = -st * ca; T[0, 2] = st * sa; T[0, 3] = a * ct
    T[1, 0] = st; T[1, 1] = ct * ca; T[1, 2] = -ct * sa; T[1, 3] = a * st
    T[2, 0] = 0.0; T[2, 1] = sa; T[2, 2] = ca; T[2, 3] = d
    T[3, 0] = 0.0; T[3, 1] = 0.0; T[3, 2] = 0.0; T[3, 3] = 1.0
    return T


# 6R chain with round-number link values: d1, a2, a3, d4, d5, d6.
DEFAULT_DH_ROWS = (
    (0.0, np.pi / 2, 0.20, 0.0),
    (0.40, 0.0, 0.0, 0.0),
    (0.35, 0.0, 0.0, 0.0),
    (0.0, np.pi / 2, 0.13, 0.0),
    (0.0, -np.pi / 2, 0.10, 0.0),
    (0.0, 0.0, 0.08, 0.0),
)

# home pose placing the tool near the middle of the table workspace,
# away from singularities (EE roughly (0.45, 0.0, 0.30))
DEFAULT_HOME_Q = (0.16, -0.37, 1.86, -1.60, -2.40, -0.33)


@dataclass(frozen=True)
class ArmModel:
    """Kinematic description of the arm.

    dh_rows: per joint (a [m], alpha [rad], d [m], theta_offset [rad])
    q_min, q_max: joint limits [rad]
    qd_max: per-joint speed cap [rad/s]
    ik_damping: DLS damping lambda; > 0 keeps the solve bounded at
        singularities
    """

    dh_rows: tuple = DEFAULT_DH_ROWS
    q_min: np.ndarray = field(default_factory=lambda: np.full(6, -2.0 * np.pi))
    q_max: np.ndarray = field(default_factory=lambda: np.full(6, 2.0 * np.pi))
    qd_max: float = 1.5
    # damping large enough to bound singular solves, small enough that DLS
    # attenuation stays inside the 5% velocity-tracking budget on this chain
    ik_damping: float = 0.01
    q_home: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_HOME_Q))

    def __post_init__(self):
        n = len(self.dh_rows)
        if n < 3:
            raise ValueError("arm needs at least 3 joints")
        if len(self.q_min) != n or len(self.q_max) != n or len(self.q_home) != n:
            raise ValueError("joint limit / home dimensions must match dh_rows")
        if np.any(np.asarray(self.q_min) >= np.asarray(self.q_max)):
            raise ValueError("q_min must be < q_max elementwise")
        if self.ik_damping < 0:
            raise ValueError("ik_damping must be >= 0")
        # link twists are constant; cache their trig for the hot FK path
        trig = tuple((a, math.cos(al), math.sin(al), d, off)
                     for a, al, d, off in self.dh_rows)
        object.__setattr__(self, "_row_trig", trig)

    @property
    def n_joints(self) -> int:
        return len(self.dh_rows)


@dataclass(frozen=True)
class JointState:
    q: np.ndarray
    qd: np.ndarray

    @staticmethod
    def at(q: np.ndarray) -> "JointState":
        q = np.asarray(q, dtype=np.float64)
        return JointState(q, np.zeros_like(q))


def _check_dim(arm: ArmModel, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (arm.n_joints,):
        raise ControllerFault(
            f"joint vector has shape {q.shape}, expected ({arm.n_joints},)")
    return q


_EYE4 = np.eye(4)
_EYE4.setflags(write=False)


def _frames(arm: ArmModel, q: np.ndarray) -> list[np.ndarray]:
    """Cumulative transforms base->joint_i for i = 0..n (frame 0 is base)."""
    T = _EYE4
    out = [T]
    A = np.empty((4, 4))
    A[3, 0] = A[3, 1] = A[3, 2] = 0.0
    A[3, 3] = 1.0
    for (a, ca, sa, d, off), qi in zip(arm._row_trig, q):
        th = qi + off
        ct, st = math.cos(th), math.sin(th)
        A[0, 0] = ct; A[0, 1] = -st * ca; A[0, 2] = st * sa; A[0, 3] = a * ct
        A[1, 0] = st; A[1, 1] = ct * ca; A[1, 2] = -ct * sa; A[1, 3] = a * st
        A[2, 0] = 0.0; A[2, 1] = sa; A[2, 2] = ca; A[2, 3] = d
        T = T @ A
        out.append(T)
    return out


def _mat_to_quat(R: np.ndarray) -> np.ndarray:
    """Rotation matrix -> unit quaternion (w, x, y, z), w >= 0."""
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    if tr > 0:
        s = np.sqrt(tr + 1.0) * 2.0
        q = np.array([0.25 * s, (R[2, 1] - R[1, 2]) / s,
                      (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s])
    else:
        i = int(np.argmax([R[0, 0], R[1, 1], R[2, 2]]))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(R[i, i] - R[j, j] - R[k, k] + 1.0) * 2.0
        q = np.empty(4)
        q[0] = (R[k, j] - R[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (R[j, i] + R[i, j]) / s
        q[1 + k] = (R[k, i] + R[i, k]) / s
    if q[0] < 0:
        q = -q
    return q / np.linalg.norm(q)


def fk(arm: ArmModel, q: np.ndarray) -> Pose:
    """End-effector pose from joint angles via DH chain composition."""
    q = _check_dim(arm, q)
    T = _frames(arm, q)[-1]
    return Pose(T[:3, 3].copy(), _mat_to_quat(T[:3, :3]))


def fk_position(arm: ArmModel, q: np.ndarray) -> np.ndarray:
    q = _check_dim(arm, q)
    return _frames(arm, q)[-1][:3, 3].copy()


def jacobian(arm: ArmModel, q: np.ndarray) -> np.ndarray:
    """Geometric Jacobian (6 x n): column i = (z_i x (p_ee - p_i), z_i)
    for revolute joint i, axes and origins taken from the DH frames."""
    q = _check_dim(arm, q)
    frames = _frames(arm, q)
    p_ee = frames[-1][:3, 3]
    J = np.empty((6, arm.n_joints))
    for i in range(arm.n_joints):
        z = frames[i][:3, 2]
        r = p_ee - frames[i][:3, 3]
        J[0, i] = z[1] * r[2] - z[2] * r[1]
        J[1, i] = z[2] * r[0] - z[0] * r[2]
        J[2, i] = z[0] * r[1] - z[1] * r[0]
        J[3:, i] = z
    return J


def ik_dls(arm: ArmModel, q: np.ndarray, v: np.ndarray,
           damping: float | None = None) -> np.ndarray:
    """Damped-least-squares differential IK.

    qd = J^T (J J^T + lambda^2 I)^-1 v for the 6-vector twist v
    (linear stacked over angular). Joint speeds are uniformly rescaled to
    respect qd_max so the direction is preserved.

    Raises ControllerFault when lambda = 0 and the configuration is
    singular.
    """
    q = _check_dim(arm, q)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (6,):
        raise ControllerFault(f"twist vector has shape {v.shape}, expected (6,)")
    lam = arm.ik_damping if damping is None else damping
    J = jacobian(arm, q)
    A = J @ J.T
    diag = lam * lam
    A[0, 0] += diag; A[1, 1] += diag; A[2, 2] += diag
    A[3, 3] += diag; A[4, 4] += diag; A[5, 5] += diag
    if lam == 0.0:
        w = np.linalg.eigvalsh(A)
        if w[0] < 1e-12 * max(w[-1], 1.0):
            raise ControllerFault("singular configuration with zero damping")
    try:
        y = np.linalg.solve(A, v)
    except np.linalg.LinAlgError as e:
        raise ControllerFault(f"IK solve failed: {e}") from e
    qd = J.T @ y
    peak = float(np.max(np.abs(qd)))
    if peak > arm.qd_max:
        qd = qd * (arm.qd_max / peak)
    return qd


def integrate(arm: ArmModel, state: JointState, qd: np.ndarray,
              dt: float) -> JointState:
    """Explicit Euler step with hard joint-limit clamping."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    qd = _check_dim(arm, qd)
    q = np.clip(state.q + dt * qd, arm.q_min, arm.q_max)
    return JointState(q, qd.copy())


def twist_vector(linear: np.ndarray, angular: np.ndarray) -> np.ndarray:
    return np.concatenate([linear, angular])
