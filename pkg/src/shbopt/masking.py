"""Partial-coordinate updating applied to an arbitrary search direction.

Four updating schemes, each rescaled by the reciprocal of the per-coordinate
selection probability so the masked direction keeps the conditional
expectation of the unmasked one:

* ``Full``                       every coordinate, scale 1.
* ``SingleCoordinate``           one uniformly drawn index, scale d.
* ``MultiCoordinate(n)``         n indices drawn uniformly WITH replacement,
  scale d/n; duplicated indices count multiply.
* ``Bernoulli(rho)``             independent per-coordinate coin flips with
  success rate rho, scale 1/rho; the touched set may be empty, in which
  case the masked direction is identically zero and the optimizer performs
  a pure momentum step.

``enumerate_mask_moments`` computes the exact mean / second moment /
variance of the masked direction for a fixed input vector by enumerating
every mask outcome; it is the ground-truth oracle the Monte-Carlo paths are
validated against, independent of any generator quality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Tuple, Union

import numpy as np


@dataclass(frozen=True)
class Full:
    pass


@dataclass(frozen=True)
class SingleCoordinate:
    pass


@dataclass(frozen=True)
class MultiCoordinate:
    n: int


@dataclass(frozen=True)
class Bernoulli:
    rho: float


MaskOption = Union[Full, SingleCoordinate, MultiCoordinate, Bernoulli]


@dataclass
class MaskedDirection:
    """Masked, rescaled direction; zero outside ``touched``."""

    phi_masked: np.ndarray
    touched: np.ndarray
    scale: float


def validate_option(option: MaskOption, d: int) -> None:
    if isinstance(option, MultiCoordinate):
        if option.n < 1 or option.n > d:
            raise ValueError(f"MultiCoordinate needs 1 <= n <= d, got n={option.n}, d={d}")
    elif isinstance(option, Bernoulli):
        if not (0.0 < option.rho <= 1.0):
            raise ValueError(f"Bernoulli needs 0 < rho <= 1, got rho={option.rho}")
    elif not isinstance(option, (Full, SingleCoordinate)):
        raise TypeError(f"unknown mask option {option!r}")


def selection_probability(option: MaskOption, d: int) -> float:
    """Per-coordinate selection likelihood; the applied scale is its reciprocal."""
    validate_option(option, d)
    if isinstance(option, Full):
        return 1.0
    if isinstance(option, SingleCoordinate):
        return 1.0 / d
    if isinstance(option, MultiCoordinate):
        return option.n / d
    return option.rho


def draw_mask_weights(option: MaskOption, d: int,
                      rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, float]:
    """One mask realization as per-coordinate multipliers.

    Returns (weights, touched, scale): the masked direction is
    weights * phi, touched lists the distinct selected indices, and scale
    is the inverse selection probability.  Duplicates under
    ``MultiCoordinate`` show up as weights above the scale.
    """
    validate_option(option, d)
    if isinstance(option, Full):
        return np.ones(d), np.arange(d), 1.0
    if isinstance(option, SingleCoordinate):
        kappa = int(rng.integers(d))
        w = np.zeros(d)
        w[kappa] = float(d)
        return w, np.array([kappa]), float(d)
    if isinstance(option, MultiCoordinate):
        idx = rng.integers(0, d, size=option.n)
        counts = np.bincount(idx, minlength=d).astype(np.float64)
        scale = d / option.n
        return scale * counts, np.flatnonzero(counts), scale
    rho = option.rho
    v = rng.random(d) < rho
    scale = 1.0 / rho
    return scale * v.astype(np.float64), np.flatnonzero(v), scale


def apply_mask(phi: np.ndarray, option: MaskOption, rng: np.random.Generator) -> MaskedDirection:
    phi = np.asarray(phi, dtype=np.float64)
    if phi.ndim != 1 or phi.shape[0] < 1:
        raise ValueError("phi must be a nonempty 1-D vector")
    weights, touched, scale = draw_mask_weights(option, phi.shape[0], rng)
    return MaskedDirection(phi_masked=weights * phi, touched=touched, scale=scale)


def sample_mask_weights(option: MaskOption, d: int, rng: np.random.Generator,
                        n: int) -> np.ndarray:
    """n independent mask-weight realizations, one per row, vectorized."""
    validate_option(option, d)
    if isinstance(option, Full):
        return np.ones((n, d))
    if isinstance(option, SingleCoordinate):
        kappa = rng.integers(0, d, size=n)
        out = np.zeros((n, d))
        out[np.arange(n), kappa] = float(d)
        return out
    if isinstance(option, MultiCoordinate):
        idx = rng.integers(0, d, size=(n, option.n))
        counts = np.zeros((n, d))
        np.add.at(counts, (np.repeat(np.arange(n), option.n), idx.ravel()), 1.0)
        return (d / option.n) * counts
    v = rng.random((n, d)) < option.rho
    return (1.0 / option.rho) * v


def sample_masked(phi: np.ndarray, option: MaskOption, rng: np.random.Generator,
                  n: int) -> np.ndarray:
    """n independent mask applications to a fixed phi, one per row."""
    phi = np.asarray(phi, dtype=np.float64)
    return sample_mask_weights(option, phi.shape[0], rng, n) * phi


# ---------------------------------------------------------------------------
# exact enumeration oracle
# ---------------------------------------------------------------------------

_ENUM_LIMITS = {"bernoulli_d": 16, "multi_pow": 1 << 20}


def enumerate_mask_outcomes(phi: np.ndarray, option: MaskOption):
    """All (probability, outcome) pairs of the masked direction for fixed phi."""
    phi = np.asarray(phi, dtype=np.float64)
    d = phi.shape[0]
    validate_option(option, d)
    if isinstance(option, Full):
        return np.array([1.0]), phi[None, :]
    if isinstance(option, SingleCoordinate):
        outs = np.zeros((d, d))
        outs[np.arange(d), np.arange(d)] = d * phi
        return np.full(d, 1.0 / d), outs
    if isinstance(option, MultiCoordinate):
        if d ** option.n > _ENUM_LIMITS["multi_pow"]:
            raise ValueError("too many index tuples to enumerate")
        outs = []
        for tup in product(range(d), repeat=option.n):
            counts = np.bincount(np.array(tup), minlength=d).astype(np.float64)
            outs.append((d / option.n) * counts * phi)
        k = d ** option.n
        return np.full(k, 1.0 / k), np.array(outs)
    if d > _ENUM_LIMITS["bernoulli_d"]:
        raise ValueError("too many coin patterns to enumerate")
    rho = option.rho
    n = 1 << d
    bits = ((np.arange(n)[:, None] >> np.arange(d)[None, :]) & 1).astype(np.float64)
    probs = (rho ** bits.sum(axis=1)) * ((1.0 - rho) ** (d - bits.sum(axis=1)))
    return probs, (1.0 / rho) * bits * phi


def enumerate_mask_moments(phi: np.ndarray, option: MaskOption):
    """Exact (mean, second_moment, variance) of the masked direction, fixed phi."""
    probs, outs = enumerate_mask_outcomes(phi, option)
    mean = probs @ outs
    second = float(probs @ np.einsum("ij,ij->i", outs, outs))
    cv = second - float(mean @ mean)
    return mean, second, cv
