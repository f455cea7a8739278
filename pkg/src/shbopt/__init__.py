"""Stochastic heavy-ball optimization with partial-coordinate updating.

The package provides the momentum recursion in two provably equivalent
forms, four coordinate-selection schemes with inverse-probability scaling,
exact/noisy and two-point approximate gradient oracles (per-coordinate
differences and shared-perturbation), deterministic step/increment
schedules, an analysis toolkit that verifies the moment identities and
bias/variance bounds empirically, and a CLI experiment harness.
"""

from .gradients import (RademacherDraw, SearchDirection, approx_a_direction,
                        approx_b_direction, draw_rademacher, exact_noisy_direction)
from .masking import (Bernoulli, Full, MaskedDirection, MultiCoordinate,
                      SingleCoordinate, apply_mask, selection_probability)
from .noise import NoiseModel, disabled_noise, function_noise_pair, gradient_noise
from .objectives import (ClassBFunction, ObjectiveSpec, check_assumption_j1,
                         check_assumption_j2, estimate_lipschitz, example31_objective,
                         hilbert_block_objective, strongly_convex_quadratic)
from .optimizers import (BaselineState, DivergenceError, ShbState, ShbVzState,
                         baseline_step, make_baseline, nesterov_momentum_sequence,
                         shb_step, shb_vz_step)
from .schedules import Schedule, alpha, increment, robbins_monro_diagnostic

__version__ = "0.1.0"

__all__ = [
    "ObjectiveSpec", "ClassBFunction", "hilbert_block_objective",
    "example31_objective", "strongly_convex_quadratic", "check_assumption_j1",
    "check_assumption_j2", "estimate_lipschitz",
    "NoiseModel", "disabled_noise", "gradient_noise", "function_noise_pair",
    "SearchDirection", "RademacherDraw", "exact_noisy_direction",
    "approx_a_direction", "approx_b_direction", "draw_rademacher",
    "Full", "SingleCoordinate", "MultiCoordinate", "Bernoulli",
    "MaskedDirection", "apply_mask", "selection_probability",
    "ShbState", "ShbVzState", "BaselineState", "DivergenceError",
    "shb_step", "shb_vz_step", "baseline_step", "make_baseline",
    "nesterov_momentum_sequence",
    "Schedule", "alpha", "increment", "robbins_monro_diagnostic",
    "__version__",
]
