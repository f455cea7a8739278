"""Steppers: the momentum recursion in two equivalent forms, plus baselines.

The primary method updates

    theta_{t+1} = theta_t + alpha_t * phi_{t+1} + mu * (theta_t - theta_{t-1})

with fixed momentum mu in [0, 1) and theta_{-1} := theta_0.  The same
trajectory can be generated without the delayed term by tracking
v_t = theta_t - theta_{t-1} and z_t = theta_t + mu/(1-mu) v_t:

    v_{t+1} = mu v_t + alpha_t phi_{t+1}
    z_{t+1} = z_t + alpha_t/(1-mu) phi_{t+1}
    theta_t = z_t - mu/(1-mu) v_t

Feeding both forms the same phi stream must reproduce identical iterates to
float accuracy; the verification suite checks exactly that.

Baselines (experimental subjects only): plain SGD, Nesterov lookahead with
fixed momentum (NAG_F) or with the accelerated lambda-sequence momentum and
constant step (NAG_S), and the adaptive family ADAM / NADAM / RMSPROP driven
by g = -phi.  Any non-finite component in a direction or an updated state
raises :class:`DivergenceError`, which the harness records as a diverged run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from . import kernels
from .masking import MaskedDirection

SHB = "shb"
SHB_VZ = "shb_vz"
SGD = "sgd"
NAG_F = "nag_f"
NAG_S = "nag_s"
ADAM = "adam"
NADAM = "nadam"
RMSPROP = "rmsprop"

BASELINE_KINDS = (SGD, NAG_F, NAG_S, ADAM, NADAM, RMSPROP)


class DivergenceError(RuntimeError):
    """An iterate or direction went non-finite."""


def direction_vector(phi: Union[np.ndarray, MaskedDirection]) -> np.ndarray:
    if isinstance(phi, MaskedDirection):
        return phi.phi_masked
    return np.asarray(phi, dtype=np.float64)


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise DivergenceError(f"non-finite {what}")


# ---------------------------------------------------------------------------
# heavy-ball, direct form
# ---------------------------------------------------------------------------

@dataclass
class ShbState:
    theta: np.ndarray
    theta_prev: np.ndarray
    mu: float
    t: int = 0

    @classmethod
    def initial(cls, theta0: np.ndarray, mu: float) -> "ShbState":
        if not (0.0 <= mu < 1.0):
            raise ValueError(f"momentum must lie in [0, 1), got {mu}")
        theta0 = np.asarray(theta0, dtype=np.float64)
        return cls(theta=theta0.copy(), theta_prev=theta0.copy(), mu=mu)


def shb_step(state: ShbState, phi, alpha_t: float) -> ShbState:
    if alpha_t < 0:
        raise ValueError("alpha_t must be nonnegative")
    v = direction_vector(phi)
    _check_finite(v, "search direction")
    theta_next = kernels.heavy_ball_update(state.theta, state.theta_prev, v,
                                           alpha_t, state.mu)
    _check_finite(theta_next, "iterate")
    return ShbState(theta=theta_next, theta_prev=state.theta, mu=state.mu,
                    t=state.t + 1)


# ---------------------------------------------------------------------------
# heavy-ball, (v, z) form
# ---------------------------------------------------------------------------

@dataclass
class ShbVzState:
    v: np.ndarray
    z: np.ndarray
    mu: float
    t: int = 0

    @classmethod
    def initial(cls, theta0: np.ndarray, mu: float) -> "ShbVzState":
        if not (0.0 <= mu < 1.0):
            raise ValueError(f"momentum must lie in [0, 1), got {mu}")
        theta0 = np.asarray(theta0, dtype=np.float64)
        return cls(v=np.zeros_like(theta0), z=theta0.copy(), mu=mu)

    @property
    def theta(self) -> np.ndarray:
        return self.z - (self.mu / (1.0 - self.mu)) * self.v


def shb_vz_step(state: ShbVzState, phi, alpha_t: float) -> ShbVzState:
    if alpha_t < 0:
        raise ValueError("alpha_t must be nonnegative")
    vec = direction_vector(phi)
    _check_finite(vec, "search direction")
    v_next = state.mu * state.v + alpha_t * vec
    z_next = state.z + (alpha_t / (1.0 - state.mu)) * vec
    _check_finite(v_next, "iterate")
    _check_finite(z_next, "iterate")
    return ShbVzState(v=v_next, z=z_next, mu=state.mu, t=state.t + 1)


# ---------------------------------------------------------------------------
# accelerated momentum sequence
# ---------------------------------------------------------------------------

def _lambda_next(lam: float) -> float:
    return (1.0 + math.sqrt(1.0 + 4.0 * lam * lam)) / 2.0


def nesterov_momentum_sequence(t: int) -> float:
    """mu_t = (lambda_t - 1)/lambda_{t+1} with lambda_0 = 0, clamped at 0.

    The raw value at t = 0 is -1, an artifact of the indexing; it is clamped
    to 0 so the first step carries no momentum.  The sequence increases to 1.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    lam = 0.0
    for _ in range(t):
        lam = _lambda_next(lam)
    return max(0.0, (lam - 1.0) / _lambda_next(lam))


def nesterov_momentum_schedule(horizon: int) -> np.ndarray:
    """mu_0 .. mu_{horizon-1} in one pass."""
    out = np.empty(horizon)
    lam = 0.0
    for t in range(horizon):
        nxt = _lambda_next(lam)
        out[t] = max(0.0, (lam - 1.0) / nxt)
        lam = nxt
    return out


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

@dataclass
class BaselineState:
    kind: str
    theta: np.ndarray
    t: int = 0
    mu: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    velocity: Optional[np.ndarray] = None     # momentum buffer (NAG variants)
    m1: Optional[np.ndarray] = None           # first-moment EMA
    m2: Optional[np.ndarray] = None           # second-moment EMA, componentwise >= 0
    lam: float = 0.0                          # accelerated-sequence state (NAG_S)


def make_baseline(kind: str, theta0: np.ndarray, mu: float = 0.9,
                  beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> BaselineState:
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline {kind!r}")
    if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
        raise ValueError("beta coefficients must lie in [0, 1)")
    if eps <= 0:
        raise ValueError("eps must be positive")
    theta0 = np.asarray(theta0, dtype=np.float64).copy()
    st = BaselineState(kind=kind, theta=theta0, mu=mu, beta1=beta1, beta2=beta2, eps=eps)
    if kind in (NAG_F, NAG_S):
        st.velocity = np.zeros_like(theta0)
    if kind in (ADAM, NADAM):
        st.m1 = np.zeros_like(theta0)
        st.m2 = np.zeros_like(theta0)
    if kind == RMSPROP:
        st.m2 = np.zeros_like(theta0)
    return st


def _current_momentum(state: BaselineState) -> float:
    if state.kind == NAG_S:
        return max(0.0, (state.lam - 1.0) / _lambda_next(state.lam))
    return state.mu


def gradient_point(state: BaselineState) -> np.ndarray:
    """Where the direction for the upcoming step should be evaluated.

    The Nesterov variants look ahead along the momentum buffer; everything
    else evaluates at the current iterate.
    """
    if state.kind in (NAG_F, NAG_S):
        return state.theta + _current_momentum(state) * state.velocity
    return state.theta


def baseline_step(state: BaselineState, phi, alpha_t: float) -> BaselineState:
    """One step of the tagged optimizer, driven by g = -phi."""
    vec = direction_vector(phi)
    _check_finite(vec, "search direction")
    t_next = state.t + 1

    if state.kind == SGD:
        theta = state.theta + alpha_t * vec
        _check_finite(theta, "iterate")
        return replace(state, theta=theta, t=t_next)

    if state.kind in (NAG_F, NAG_S):
        mu_t = _current_momentum(state)
        vel = mu_t * state.velocity + alpha_t * vec
        theta = state.theta + vel
        _check_finite(vel, "momentum buffer")
        _check_finite(theta, "iterate")
        lam = _lambda_next(state.lam) if state.kind == NAG_S else state.lam
        return replace(state, theta=theta, velocity=vel, t=t_next, lam=lam)

    g = -vec
    if state.kind == RMSPROP:
        m2 = state.beta2 * state.m2 + (1.0 - state.beta2) * g * g
        theta = state.theta - alpha_t * g / (np.sqrt(m2) + state.eps)
        _check_finite(m2, "second-moment accumulator")
        _check_finite(theta, "iterate")
        return replace(state, theta=theta, m2=m2, t=t_next)

    # adaptive-moment family
    m1 = state.beta1 * state.m1 + (1.0 - state.beta1) * g
    m2 = state.beta2 * state.m2 + (1.0 - state.beta2) * g * g
    bc1 = 1.0 - state.beta1 ** t_next
    bc2 = 1.0 - state.beta2 ** t_next
    denom = np.sqrt(m2 / bc2) + state.eps
    if state.kind == ADAM:
        step = (m1 / bc1) / denom
    else:  # NADAM: lookahead first moment
        step = (state.beta1 * m1 / bc1 + (1.0 - state.beta1) * g / bc1) / denom
    theta = state.theta - alpha_t * step
    _check_finite(m2, "second-moment accumulator")
    _check_finite(theta, "iterate")
    return replace(state, theta=theta, m1=m1, m2=m2, t=t_next)
