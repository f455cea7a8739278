"""Deterministic step, increment, and rate sequences plus summability diagnostics.

The experiment sequences are power laws in shifted time,

    alpha_t = alpha0 / (1 + t/tau)^p,      c_t = c0 / (1 + t/tau)^q,

which with tau = 1 also express the offset laws alpha0/(t+1)^p used in the
rate experiments.  :func:`robbins_monro_diagnostic` estimates, for a finite
horizon, whether the partial sums the convergence theory needs are heading
toward convergence or divergence.  The verdicts are heuristic tail-exponent
fits; they warn, they never gate a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

EXACT_GRADIENT = "exact-gradient"
APPROX_GRADIENT = "approx-gradient"


@dataclass
class Schedule:
    alpha0: float = 1e-3
    tau: float = 200.0
    p: float = 1.0
    c0: float = 1e-4
    q: float = 0.01
    rho: float = 1.0
    horizon: int = 100_000

    def __post_init__(self):
        if self.alpha0 <= 0 or self.tau <= 0 or self.c0 <= 0:
            raise ValueError("alpha0, tau, c0 must be positive")
        if self.p < 0 or self.q < 0:
            raise ValueError("exponents p, q must be nonnegative")
        if not (0.0 < self.rho <= 1.0):
            raise ValueError("rho must lie in (0, 1]")


def alpha(sched: Schedule, t) -> float | np.ndarray:
    return sched.alpha0 / (1.0 + np.asarray(t, dtype=np.float64) / sched.tau) ** sched.p


def increment(sched: Schedule, t) -> float | np.ndarray:
    return sched.c0 / (1.0 + np.asarray(t, dtype=np.float64) / sched.tau) ** sched.q


@dataclass
class TermDiagnostic:
    name: str
    partial_sum: float
    tail_exponent: float
    summable: bool
    marginal: bool


@dataclass
class DiagnosticReport:
    mode: str
    terms: Dict[str, TermDiagnostic]
    hypotheses_satisfied: bool
    warnings: List[str] = field(default_factory=list)


def _tail_exponent(values: np.ndarray, t: np.ndarray) -> float:
    """Log-log slope of the term over the last decade of the horizon."""
    lo = t[-1] // 10
    sel = t >= max(lo, 1)
    x = np.log(t[sel].astype(np.float64))
    y = np.log(values[sel])
    return float(np.polyfit(x, y, 1)[0])


_MARGIN = 0.05


def robbins_monro_diagnostic(sched: Schedule, horizon: int,
                             mode: str = APPROX_GRADIENT) -> DiagnosticReport:
    """Partial sums and summability verdicts for the step-size conditions.

    A term is flagged ``summable`` when its fitted tail exponent lies strictly
    below -1 (the p-series threshold); fits within 0.05 of the threshold are
    additionally flagged ``marginal``.  Hypotheses checked:

    * exact-gradient mode:  sum a_t^2 < inf  and  sum a_t = inf.
    * approx-gradient mode: additionally sum a_t c_t < inf and
      sum (a_t/c_t)^2 < inf.

    The divergent-weight condition sum_t a_t / sum_{s<t} a_s = inf holds
    exactly when sum a_t itself diverges (the partial sums telescope against
    log sum a), so it is reported through the sum-a verdict.
    """
    if horizon < 1000:
        raise ValueError("diagnostic needs horizon >= 1000")
    if mode not in (EXACT_GRADIENT, APPROX_GRADIENT):
        raise ValueError(f"unknown mode {mode!r}")
    t = np.arange(horizon, dtype=np.int64)
    a = alpha(sched, t)
    c = increment(sched, t)
    series = {
        "sum_alpha": a,
        "sum_alpha_sq": a * a,
        "sum_alpha_c": a * c,
        "sum_alpha_over_c_sq": (a / c) ** 2,
    }
    terms = {}
    for name, vals in series.items():
        e = _tail_exponent(vals, t)
        terms[name] = TermDiagnostic(
            name=name,
            partial_sum=float(vals.sum()),
            tail_exponent=e,
            summable=e < -1.0,
            marginal=abs(e + 1.0) < _MARGIN,
        )

    warnings = []
    need_summable = ["sum_alpha_sq"]
    if mode == APPROX_GRADIENT:
        need_summable += ["sum_alpha_c", "sum_alpha_over_c_sq"]
    ok = True
    for name in need_summable:
        if not terms[name].summable:
            ok = False
            warnings.append(f"{name} does not look summable "
                            f"(tail exponent {terms[name].tail_exponent:.3f})")
    if terms["sum_alpha"].summable:
        ok = False
        warnings.append("sum_alpha looks summable; the step sizes decay too fast")
    for name, term in terms.items():
        if term.marginal:
            warnings.append(f"{name} verdict is marginal "
                            f"(tail exponent {term.tail_exponent:.3f})")
    return DiagnosticReport(mode=mode, terms=terms, hypotheses_satisfied=ok,
                            warnings=warnings)
