"""Particle filter over the human's intention.

Hypotheses are the K goal regions plus one cooperation hypothesis ("guide
the robot"). Each particle carries a label and a weight; labels mutate
with small probability every step so the posterior can follow a human who
changes their mind. Weights are updated from the observed hand
displacement against a constant-speed motion model toward the labelled
target (goal center, or the end-effector for the cooperation label).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigError, Rng

COOPERATE = -1  # label value for the cooperation hypothesis


def label_name(label: int) -> str:
    return "cooperate" if label == COOPERATE else f"goal_{label}"


@dataclass(frozen=True)
class GoalRegion:
    id: int
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError("goal region radius must be > 0")


@dataclass(frozen=True)
class FilterParams:
    n_particles: int = 500
    mutation_rate: float = 0.02
    obs_sigma: float = 0.02        # m, displacement likelihood scale
    model_speed: float = 0.10      # m/s, assumed hand speed toward target
    ess_fraction: float = 0.5      # resample when ESS drops below this * n
    arrival_radius: float = 0.03   # m, inside this the model predicts rest

    def __post_init__(self):
        if self.n_particles < 10:
            raise ConfigError("n_particles must be >= 10")
        if not (0.0 <= self.mutation_rate < 1.0):
            raise ConfigError("mutation_rate must be in [0, 1)")
        if self.obs_sigma <= 0:
            raise ConfigError("obs_sigma must be > 0")
        if not (0.0 < self.ess_fraction <= 1.0):
            raise ConfigError("ess_fraction must be in (0, 1]")
        if self.model_speed <= 0 or self.arrival_radius <= 0:
            raise ConfigError("model_speed and arrival_radius must be > 0")


@dataclass(frozen=True)
class IntentionBelief:
    """Posterior over intention labels.

    probs: length K+1, goals 0..K-1 first, cooperation hypothesis last.
    mle: goal id, or COOPERATE. Ties go to the lowest goal id and the
    cooperation hypothesis loses every tie.
    degenerate: the last update underflowed and weights were reset.
    """

    probs: np.ndarray
    mle: int
    cooperation_prob: float
    entropy: float
    degenerate: bool = False


@dataclass
class FilterState:
    labels: np.ndarray           # int label per particle, COOPERATE == K
    weights: np.ndarray
    prev_hand: np.ndarray | None
    goals: list[GoalRegion]
    params: FilterParams
    rng: Rng

    @property
    def n_labels(self) -> int:
        return len(self.goals) + 1


def _mle_from_probs(probs: np.ndarray, k: int) -> int:
    goal_best = int(np.argmax(probs[:k]))  # argmax takes the lowest id on ties
    if probs[k] > probs[goal_best]:
        return COOPERATE
    return goal_best


def _belief(labels: np.ndarray, weights: np.ndarray, k: int,
            degenerate: bool = False) -> IntentionBelief:
    probs = np.bincount(labels, weights=weights, minlength=k + 1)
    total = probs.sum()
    if total > 0:
        probs = probs / total
    p = probs[probs > 0]
    entropy = float(-(p * np.log(p)).sum())
    return IntentionBelief(
        probs=probs,
        mle=_mle_from_probs(probs, k),
        cooperation_prob=float(probs[k]),
        entropy=entropy,
        degenerate=degenerate,
    )


def init_filter(goals: list[GoalRegion], params: FilterParams,
                seed: int) -> FilterState:
    """Uniform prior: particles assigned round-robin over the K+1 labels
    (remainder to the lowest labels), uniform weights."""
    if not goals:
        raise ConfigError("at least one goal region is required")
    ids = sorted(g.id for g in goals)
    if ids != list(range(len(goals))):
        raise ConfigError("goal ids must be unique and contiguous from 0")
    goals = sorted(goals, key=lambda g: g.id)
    n = params.n_particles
    k = len(goals)
    labels = np.arange(n, dtype=np.int64) % (k + 1)
    weights = np.full(n, 1.0 / n)
    return FilterState(labels=labels, weights=weights, prev_hand=None,
                       goals=list(goals), params=params, rng=Rng(seed, stream=1))


def predicted_velocity(label: int, hand: np.ndarray, ee: np.ndarray,
                       goals: list[GoalRegion], params: FilterParams) -> np.ndarray:
    """Constant-speed motion model: unit vector from the hand toward the
    labelled target times model_speed; rest inside the arrival radius."""
    target = ee if label == COOPERATE else goals[label].center
    d = target - hand
    dist = float(np.linalg.norm(d))
    if dist <= params.arrival_radius:
        return np.zeros(3)
    return (params.model_speed / dist) * d


def _target_matrix(state: FilterState, ee: np.ndarray) -> np.ndarray:
    """Stack of per-label targets, rows 0..K-1 goals, row K the EE."""
    k = len(state.goals)
    targets = np.empty((k + 1, 3))
    for g in state.goals:
        targets[g.id] = g.center
    targets[k] = ee
    return targets


def step_filter(state: FilterState, hand_obs: np.ndarray, ee: np.ndarray,
                dt: float) -> tuple[FilterState, IntentionBelief]:
    """One filter update: mutate labels, reweight by the displacement
    likelihood, normalize, resample when the effective sample size drops,
    and extract the belief.

    The first call only stores the hand observation and returns the prior.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    p = state.params
    k = len(state.goals)
    hand_obs = np.asarray(hand_obs, dtype=np.float64)

    if state.prev_hand is None:
        state.prev_hand = hand_obs.copy()
        return state, _belief(state.labels, state.weights, k)

    # 1. mutation: each particle redraws its label uniformly with prob mutation_rate
    if p.mutation_rate > 0:
        mutate = state.rng.uniforms(len(state.labels)) < p.mutation_rate
        n_mut = int(mutate.sum())
        if n_mut:
            state.labels[mutate] = state.rng.integers(0, k + 1, size=n_mut)

    # 2. displacement likelihood, isotropic normal per axis
    prev = state.prev_hand
    targets = _target_matrix(state, ee)
    diff = targets - prev
    dist = np.linalg.norm(diff, axis=1)
    speed = np.where(dist > p.arrival_radius, p.model_speed, 0.0)
    mean_disp = diff * (speed / np.maximum(dist, 1e-300))[:, None] * dt
    obs_disp = hand_obs - prev
    sigma = p.obs_sigma * np.sqrt(dt)
    err = obs_disp[None, :] - mean_disp
    loglik = -np.sum(err * err, axis=1) / (2.0 * sigma * sigma)
    loglik -= loglik.max()  # common factor cancels in normalization
    lik = np.exp(loglik)

    # map cooperate label (stored as k) through the per-label table
    weights = state.weights * lik[state.labels]

    # 3. normalize, with a uniform reset if everything underflowed
    total = weights.sum()
    degenerate = not np.isfinite(total) or total <= 0.0
    if degenerate:
        weights = np.full(len(weights), 1.0 / len(weights))
    else:
        weights = weights / total

    # 4. systematic resampling on low effective sample size
    ess = 1.0 / float(np.sum(weights * weights))
    if ess < p.ess_fraction * p.n_particles:
        u0 = state.rng.uniform()
        positions = (np.arange(p.n_particles) + u0) / p.n_particles
        cum = np.cumsum(weights)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, positions)
        state.labels = state.labels[idx].copy()
        weights = np.full(p.n_particles, 1.0 / p.n_particles)

    state.weights = weights
    state.prev_hand = hand_obs.copy()
    return state, _belief(state.labels, state.weights, k, degenerate)


def mle_intention(belief: IntentionBelief) -> int:
    """Argmax label; ties resolve to the lowest goal id, never cooperation."""
    return _mle_from_probs(belief.probs, len(belief.probs) - 1)
