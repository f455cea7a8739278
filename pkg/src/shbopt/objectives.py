"""Test objectives, their exact gradients, and empirical assumption checkers.

Each objective is packaged as an :class:`ObjectiveSpec` carrying the value
function, the exact gradient, a valid gradient-Lipschitz constant, and the
global infimum when it is known.  The checkers at the bottom probe, by
sampling, the growth/coupling conditions the convergence theory needs:

* ``check_assumption_j1``:   ||grad J||^2 <= H * (J - J*)
* ``check_assumption_j2``:   eta(J - J*) <= ||grad J|| for a Class-B eta

A Class-B function is nonnegative, vanishes at 0, and has positive infimum
on every interval [eps, M] with 0 < eps < M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels

Array = np.ndarray


@dataclass
class ObjectiveSpec:
    """A smooth objective with exact oracles.

    ``lipschitz`` is an upper bound on the Lipschitz constant of the
    gradient, and ``infimum`` the attained global minimum value when known.
    Evaluation is pure and reentrant; specs are safe to share across runs.
    """

    dim: int
    eval: Callable[[Array], float]
    grad: Callable[[Array], Array]
    lipschitz: float
    infimum: Optional[float] = None
    strong_convexity: Optional[float] = None
    name: str = ""

    def suboptimality(self, theta: Array) -> float:
        if self.infimum is None:
            raise ValueError(f"objective {self.name!r} has no known infimum")
        return self.eval(theta) - self.infimum


@dataclass
class ClassBFunction:
    """Nonnegative scalar function with eta(0)=0, positive away from zero."""

    eta: Callable[[float], float]
    name: str = ""

    def __call__(self, r: float) -> float:
        return self.eta(r)


def sqrt_growth(strong_convexity: float) -> ClassBFunction:
    """eta(r) = sqrt(2 R r), the growth function of an R-strongly-convex objective."""
    R = float(strong_convexity)
    if R <= 0:
        raise ValueError("strong convexity constant must be positive")
    return ClassBFunction(lambda r: math.sqrt(2.0 * R * r), name=f"sqrt({2 * R}r)")


def check_class_b(fn: ClassBFunction, eps_grid: Sequence[float] = (1e-6, 1e-3, 0.1),
                  m_grid: Sequence[float] = (1.0, 10.0, 1e3), points_per_interval: int = 200) -> bool:
    """Sampled check of the Class-B conditions."""
    if abs(fn(0.0)) > 1e-12:
        return False
    for eps in eps_grid:
        for m in m_grid:
            if eps >= m:
                continue
            rs = np.geomspace(eps, m, points_per_interval)
            vals = np.array([fn(float(r)) for r in rs])
            if np.any(vals < 0) or vals.min() <= 0:
                return False
    return True


# ---------------------------------------------------------------------------
# shipped objectives
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def hilbert_block(block_size: int) -> Array:
    """The shared (m, m) block with entries 1/(i+j-1), 1-indexed."""
    idx = np.arange(block_size, dtype=np.float64)
    h = 1.0 / (np.add.outer(idx, idx) + 1.0)
    h.setflags(write=False)
    return h


@lru_cache(maxsize=8)
def _hilbert_lambda_max(block_size: int) -> float:
    if block_size <= 1024:
        return float(np.linalg.eigvalsh(np.asarray(hilbert_block(block_size)))[-1])
    # finite sections of the infinite Hilbert operator have norm < pi
    return math.pi


def hilbert_block_objective(num_blocks: int, block_size: int) -> ObjectiveSpec:
    """Block quadratic with ill-conditioned blocks plus a log-sum-exp term.

    J(theta) = theta:A theta + log sum_i exp(theta_i), where A is
    block-diagonal with ``num_blocks`` identical blocks H_{ij} = 1/(i+j-1).
    The d x d matrix is never formed; each evaluation applies the shared
    block to the reshaped argument.  Gradient: 2 A theta + softmax(theta)
    (the blocks are symmetric).  The log-sum-exp uses a max shift, so
    arguments with entries around +-1e4 stay finite.
    """
    if num_blocks < 1 or block_size < 1:
        raise ValueError("num_blocks and block_size must be >= 1")
    d = num_blocks * block_size
    h = hilbert_block(block_size)
    # softmax Hessian norm is at most 1/2, so this bounds the full Hessian
    lam = _hilbert_lambda_max(block_size)
    lipschitz = 2.0 * lam + 0.5

    def _eval(theta: Array) -> float:
        x = np.ascontiguousarray(theta, dtype=np.float64).reshape(num_blocks, block_size)
        return kernels.block_quad(x, h) + kernels.logsumexp(theta)

    def _grad(theta: Array) -> Array:
        x = np.ascontiguousarray(theta, dtype=np.float64).reshape(num_blocks, block_size)
        quad_grad = kernels.block_quad_grad(x, h)[1].reshape(d)
        _, soft = kernels.logsumexp_softmax(np.asarray(theta, dtype=np.float64))
        return quad_grad + soft

    return ObjectiveSpec(
        dim=d,
        eval=_eval,
        grad=_grad,
        lipschitz=lipschitz,
        infimum=None,
        name=f"hilbert[{num_blocks}x{block_size}]",
    )


_HALF_PI = math.pi / 2.0


def _wavy_1d(x: float) -> float:
    if x > 5.0:
        return 0.5 + math.sqrt(_HALF_PI * (x - 5.0) + 0.25)
    if x < -5.0:
        return _wavy_1d(-x)
    return math.sin(_HALF_PI * (x - 1.0)) + 1.0


def _wavy_1d_prime(x: float) -> float:
    if x > 5.0:
        return (math.pi / 4.0) / math.sqrt(_HALF_PI * (x - 5.0) + 0.25)
    if x < -5.0:
        return -_wavy_1d_prime(-x)
    return _HALF_PI * math.cos(_HALF_PI * (x - 1.0))


def example31_objective() -> ObjectiveSpec:
    """1-D nonconvex objective whose every local minimum is global.

    A sine wave of period 4 on [-5, 5] glued C^1-continuously to square-root
    growth outside, mirrored for negative arguments.  Minima sit at 0 and
    +-4 with value 0.  The largest curvature occurs at the glue points,
    giving gradient-Lipschitz constant pi^2/2.
    """

    def _eval(theta: Array) -> float:
        return _wavy_1d(float(np.asarray(theta).reshape(-1)[0]))

    def _grad(theta: Array) -> Array:
        return np.array([_wavy_1d_prime(float(np.asarray(theta).reshape(-1)[0]))])

    return ObjectiveSpec(
        dim=1,
        eval=_eval,
        grad=_grad,
        lipschitz=math.pi ** 2 / 2.0,
        infimum=0.0,
        name="wavy1d",
    )


def strongly_convex_quadratic(d: int, R: float, L: float) -> ObjectiveSpec:
    """J(theta) = 0.5 theta:D theta with diagonal D linearly spaced in [R, L]."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not (0 < R <= L):
        raise ValueError(f"need 0 < R <= L, got R={R}, L={L}")
    diag = np.linspace(R, L, d)

    def _eval(theta: Array) -> float:
        th = np.asarray(theta, dtype=np.float64)
        return 0.5 * float(np.dot(diag * th, th))

    def _grad(theta: Array) -> Array:
        return diag * np.asarray(theta, dtype=np.float64)

    return ObjectiveSpec(
        dim=d,
        eval=_eval,
        grad=_grad,
        lipschitz=float(L),
        infimum=0.0,
        strong_convexity=float(R),
        name=f"quadratic[d={d},R={R},L={L}]",
    )


# ---------------------------------------------------------------------------
# assumption checkers (sampling-based, not proofs)
# ---------------------------------------------------------------------------

def gaussian_samples(dim: int, n: int, radius: float, rng: np.random.Generator) -> Array:
    """n Gaussian draws scaled so the typical norm is about ``radius``."""
    return rng.normal(0.0, radius / math.sqrt(dim), size=(n, dim))


def check_assumption_j1(obj: ObjectiveSpec, H: float, samples: Array):
    """Does ||grad J||^2 <= H * (J - J*) hold at every sample?

    Returns (ok, worst_ratio) with the 0/0 case at stationary points
    counted as ratio 0.
    """
    if obj.infimum is None:
        raise ValueError("check_assumption_j1 needs a known infimum")
    worst = 0.0
    for theta in np.atleast_2d(samples):
        g2 = float(np.dot(obj.grad(theta), obj.grad(theta)))
        jbar = obj.eval(theta) - obj.infimum
        if jbar <= 0.0:
            ratio = 0.0 if g2 <= 1e-18 else math.inf
        else:
            ratio = g2 / jbar
        worst = max(worst, ratio)
    return worst <= H, worst


def check_assumption_j2(obj: ObjectiveSpec, eta: ClassBFunction, samples: Array) -> bool:
    """Does eta(J - J*) <= ||grad J|| hold at every sample?"""
    if obj.infimum is None:
        raise ValueError("check_assumption_j2 needs a known infimum")
    for theta in np.atleast_2d(samples):
        jbar = max(obj.eval(theta) - obj.infimum, 0.0)
        gnorm = float(np.linalg.norm(obj.grad(theta)))
        if eta(jbar) > gnorm + 1e-12 * (1.0 + gnorm):
            return False
    return True


def estimate_lipschitz(obj: ObjectiveSpec, region_radius: float, samples: int,
                       rng: Optional[np.random.Generator] = None) -> float:
    """Lower bound on L from sampled gradient difference quotients."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if rng is None:
        rng = np.random.default_rng(0)
    pts = gaussian_samples(obj.dim, samples, region_radius, rng)
    grads = np.array([obj.grad(p) for p in pts])
    best = 0.0
    for i in range(samples - 1):
        dx = pts[i + 1] - pts[i]
        denom = float(np.linalg.norm(dx))
        if denom < 1e-14:
            continue
        best = max(best, float(np.linalg.norm(grads[i + 1] - grads[i])) / denom)
    return best
