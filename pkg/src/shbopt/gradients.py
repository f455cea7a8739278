"""Search-direction constructors.

Three ways to produce the (unmasked) direction phi that drives an update:

* ``exact_noisy_direction``   phi = -grad J(theta) + zeta, zeta zero-mean AWGN.
* ``approx_a_direction``      per-coordinate two-sided differences, two noisy
  function measurements per requested coordinate.  When a coordinate subset
  is supplied only those entries are estimated, so the measurement count is
  2 * |coords| rather than 2d.
* ``approx_b_direction``      simultaneous perturbation: one shared +-1
  perturbation vector, two function measurements total regardless of d,
  component i reads off the shared difference divided by delta_i (= times
  delta_i, since delta_i is +-1).

Signs are chosen so phi is a descent direction estimate: phi ~ -grad J.
With noise disabled, averaging the simultaneous-perturbation direction over
all 2^d sign patterns recovers the exact gradient on quadratics; the cross
terms delta_i*delta_j average to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .noise import FUNCTION_REFERENCE_FLOOR, NoiseModel, function_noise_pair, gradient_noise
from .objectives import ObjectiveSpec

EXACT = "exact"
APPROX_A = "approx_a"
APPROX_B = "approx_b"


@dataclass
class SearchDirection:
    phi: np.ndarray
    mode: str
    fevals: int
    increment_used: float = 0.0


@dataclass
class RademacherDraw:
    """A +-1 perturbation vector; every component is exactly +1 or -1."""

    delta: np.ndarray

    def __post_init__(self):
        self.delta = np.asarray(self.delta, dtype=np.float64)
        if self.delta.ndim != 1 or not np.all(np.abs(self.delta) == 1.0):
            raise ValueError("delta must be a 1-D vector of +-1 entries")

    @property
    def dim(self) -> int:
        return self.delta.shape[0]


def draw_rademacher(d: int, rng: np.random.Generator) -> RademacherDraw:
    if d < 1:
        raise ValueError("d must be >= 1")
    return RademacherDraw(rng.integers(0, 2, size=d) * 2.0 - 1.0)


def exact_noisy_direction(obj: ObjectiveSpec, theta: np.ndarray,
                          noise: NoiseModel | None = None) -> SearchDirection:
    """phi = -grad J(theta) + zeta; consumes no function evaluations."""
    g = obj.grad(theta)
    phi = -g + gradient_noise(noise, g)
    return SearchDirection(phi=phi, mode=EXACT, fevals=0, increment_used=0.0)


def _pair_reference(jp: float, jm: float) -> float:
    return max((jp - jm) ** 2, FUNCTION_REFERENCE_FLOOR)


def approx_a_direction(obj: ObjectiveSpec, theta: np.ndarray, c_t: float,
                       noise: NoiseModel | None = None,
                       coords: np.ndarray | None = None) -> SearchDirection:
    """Two-sided difference estimate on the requested coordinates.

    Component i of the result is
    -[J(theta + c e_i) + xi_i+  -  J(theta - c e_i) - xi_i-] / (2c),
    with an independent error pair per coordinate.  Untouched components
    are zero and cost nothing.
    """
    if c_t <= 0:
        raise ValueError("increment c_t must be positive")
    theta = np.asarray(theta, dtype=np.float64)
    d = theta.shape[0]
    if coords is None:
        coords = np.arange(d)
    else:
        coords = np.asarray(coords, dtype=np.intp)
    phi = np.zeros(d)
    work = theta.copy()
    noisy = noise is not None and noise.enabled
    for i in coords:
        base = work[i]
        work[i] = base + c_t
        jp = obj.eval(work)
        work[i] = base - c_t
        jm = obj.eval(work)
        work[i] = base
        if noisy:
            xi_p, xi_m = function_noise_pair(noise, _pair_reference(jp, jm))
            phi[i] = -((jp + xi_p) - (jm + xi_m)) / (2.0 * c_t)
        else:
            phi[i] = -(jp - jm) / (2.0 * c_t)
    return SearchDirection(phi=phi, mode=APPROX_A, fevals=2 * len(coords),
                           increment_used=c_t)


def approx_b_direction(obj: ObjectiveSpec, theta: np.ndarray, c_t: float,
                       noise: NoiseModel | None, draw: RademacherDraw) -> SearchDirection:
    """Shared-perturbation estimate: two evaluations, all d components.

    The clean difference (J(theta+c*delta) - J(theta-c*delta)) / 2c is
    computed once and broadcast; each component divides by its own delta_i
    and carries its own independent measurement-error pair.  Re-evaluating
    the objective per component is deliberately impossible here: it would
    change both the cost accounting and the error correlation structure.
    """
    if c_t <= 0:
        raise ValueError("increment c_t must be positive")
    theta = np.asarray(theta, dtype=np.float64)
    d = theta.shape[0]
    if draw.dim != d:
        raise ValueError(f"perturbation has dim {draw.dim}, expected {d}")
    delta = draw.delta
    jp = obj.eval(theta + c_t * delta)
    jm = obj.eval(theta - c_t * delta)
    vbar = (jp - jm) / (2.0 * c_t)
    if noise is not None and noise.enabled:
        xi_p, xi_m = function_noise_pair(noise, _pair_reference(jp, jm), size=d)
        phi = -(vbar + (xi_p - xi_m) / (2.0 * c_t)) * delta
    else:
        phi = -vbar * delta
    return SearchDirection(phi=phi, mode=APPROX_B, fevals=2, increment_used=c_t)


def enumerate_sign_patterns(d: int) -> np.ndarray:
    """All 2^d +-1 patterns, one per row; the exact-expectation oracle for d <= ~10."""
    if d > 20:
        raise ValueError("pattern enumeration is only meant for small d")
    n = 1 << d
    bits = (np.arange(n)[:, None] >> np.arange(d)[None, :]) & 1
    return bits * 2.0 - 1.0
