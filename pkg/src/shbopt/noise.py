"""Additive white Gaussian noise for gradient and function-value measurements.

Noise strength is set by a signal-to-noise ratio in decibels: the noise
power is P / 10^(snr_db/10) where P is a per-call reference power supplied
by the caller.  Gradient noise references the mean-square component of the
clean gradient being corrupted.  Function-measurement noise references the
power of the clean measurement pair's difference (floored at 1e-12), which
keeps the ratio meaningful as the iterate converges and the differences
shrink.  ``snr_db = inf`` disables noise and draws nothing from the stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

GRADIENT = "gradient"
FUNCTION = "function"

FUNCTION_REFERENCE_FLOOR = 1e-12


@dataclass
class NoiseModel:
    """AWGN source with a dedicated generator.

    ``rng`` should come from :func:`shbopt.streams.stream` so that each
    (seed, iteration, purpose) triple owns a disjoint, replayable stream.
    """

    snr_db: float
    kind: str = GRADIENT
    rng: Optional[np.random.Generator] = None

    def __post_init__(self):
        if self.kind not in (GRADIENT, FUNCTION):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.enabled and self.rng is None:
            raise ValueError("an enabled NoiseModel needs an rng")

    @property
    def enabled(self) -> bool:
        return math.isfinite(self.snr_db)

    @property
    def attenuation(self) -> float:
        """Noise power per unit of reference power."""
        return 10.0 ** (-self.snr_db / 10.0)


def disabled_noise(kind: str = GRADIENT) -> NoiseModel:
    return NoiseModel(snr_db=math.inf, kind=kind)


def gradient_noise(model: Optional[NoiseModel], reference: np.ndarray) -> np.ndarray:
    """I.i.d. Gaussian vector with per-component variance ||ref||^2/d / 10^(snr/10)."""
    reference = np.asarray(reference, dtype=np.float64)
    d = reference.shape[0]
    if model is None or not model.enabled:
        return np.zeros(d)
    power = float(np.dot(reference, reference)) / d
    sigma = math.sqrt(power * model.attenuation)
    return model.rng.normal(0.0, sigma, size=d)


def function_noise_pair(model: Optional[NoiseModel], reference_power: float,
                        size: Optional[int] = None) -> Tuple[Union[float, np.ndarray], Union[float, np.ndarray]]:
    """Independent zero-mean Gaussian errors for a two-sided measurement.

    Each side has variance reference_power / 10^(snr/10); the combined
    error (xi+ - xi-)/2 then has half that variance.  Scalars are returned
    when ``size`` is None, otherwise arrays of independent pairs.
    """
    if reference_power < 0:
        raise ValueError("reference_power must be nonnegative")
    if model is None or not model.enabled:
        return (0.0, 0.0) if size is None else (np.zeros(size), np.zeros(size))
    sigma = math.sqrt(reference_power * model.attenuation)
    if size is None:
        return float(model.rng.normal(0.0, sigma)), float(model.rng.normal(0.0, sigma))
    return model.rng.normal(0.0, sigma, size=size), model.rng.normal(0.0, sigma, size=size)
