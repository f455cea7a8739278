"""Experiment harness: configuration, runs, sweeps, verification suites.

A run is fully determined by (config, seed).  All randomness is drawn from
counter-based streams keyed by (seed, iteration, purpose), so re-running a
config reproduces traces byte for byte, and the true-value probes written to
the trace never touch the optimizer's streams.

Trace CSV columns (exact order):
    t, jbar, grad_norm, fevals, coords_updated, alpha_t, c_t
where ``jbar`` is the gap to the reference minimum, ``fevals`` counts the
measurements consumed to reach the logged iterate, and ``coords_updated``
is the number of coordinates the update at that iteration touches.

Summary CSV columns:
    config_id, optimizer, mask, gradient_mode, rho, snr_db, seed,
    final_jbar, total_fevals, status
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import analysis, streams
from .gradients import (APPROX_A, APPROX_B, EXACT, approx_a_direction,
                        approx_b_direction, draw_rademacher, exact_noisy_direction)
from .masking import (Bernoulli, Full, MaskOption, MultiCoordinate,
                      SingleCoordinate, draw_mask_weights)
from .noise import FUNCTION, GRADIENT, NoiseModel, disabled_noise
from .objectives import (ObjectiveSpec, example31_objective,
                         hilbert_block_objective, strongly_convex_quadratic)
from .optimizers import (ADAM, BASELINE_KINDS, NADAM, NAG_F, NAG_S, RMSPROP, SGD,
                         SHB, SHB_VZ, DivergenceError, ShbState, ShbVzState,
                         baseline_step, gradient_point, make_baseline, shb_step,
                         shb_vz_step)
from .schedules import Schedule, alpha as sched_alpha, increment as sched_increment

OPTIMIZERS = (SHB, SHB_VZ) + BASELINE_KINDS
GRADIENT_MODES = (EXACT, APPROX_A, APPROX_B)
MASKS = ("full", "single", "multi", "bernoulli")
OBJECTIVES = ("hilbert", "quadratic", "wavy1d")

STATUS_COMPLETED = "completed"
STATUS_DIVERGED = "diverged"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    # objective
    objective: str = "hilbert"
    num_blocks: int = 100
    block_size: int = 100
    dim: int = 100                 # quadratic only
    quad_r: float = 1.0
    quad_l: float = 10.0
    # optimizer
    optimizer: str = SHB
    mu: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    # direction construction
    gradient: str = EXACT
    mask: str = "bernoulli"
    multi_n: int = 1
    rho: float = 0.2
    snr_db: float = math.inf
    # schedules
    alpha0: float = 1e-3
    tau: float = 200.0
    p: float = 1.0
    c0: float = 1e-4
    q: float = 0.01
    # run control
    iters: int = 100_000
    seeds: Tuple[int, ...] = (0, 1, 2, 3, 4)
    log_interval: int = 100
    theta0: str = "gaussian"
    theta0_scale: float = 1.0
    fail_on_divergence: bool = False
    out: str = "results"

    def validate(self) -> None:
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.gradient not in GRADIENT_MODES:
            raise ConfigError(f"unknown gradient mode {self.gradient!r}")
        if self.mask not in MASKS:
            raise ConfigError(f"unknown mask {self.mask!r}")
        if self.mask == "bernoulli" and not (0.0 < self.rho <= 1.0):
            raise ConfigError(f"bernoulli mask needs 0 < rho <= 1, got {self.rho}")
        if self.mask == "multi" and self.multi_n < 1:
            raise ConfigError("multi mask needs multi_n >= 1")
        if self.gradient in (APPROX_A, APPROX_B) and self.c0 <= 0:
            raise ConfigError("approximate gradients need a positive increment law c0")
        if not (0.0 <= self.mu < 1.0):
            raise ConfigError(f"momentum must lie in [0, 1), got {self.mu}")
        if self.alpha0 <= 0 or self.tau <= 0:
            raise ConfigError("alpha0 and tau must be positive")
        if self.p < 0 or self.q < 0:
            raise ConfigError("p and q must be nonnegative")
        if self.iters < 1 or self.log_interval < 1:
            raise ConfigError("iters and log_interval must be >= 1")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.theta0 not in ("zeros", "gaussian"):
            raise ConfigError(f"unknown theta0 mode {self.theta0!r}")
        if self.theta0_scale < 0:
            raise ConfigError("theta0_scale must be nonnegative")
        if self.objective == "quadratic" and not (0 < self.quad_r <= self.quad_l):
            raise ConfigError("quadratic needs 0 < quad_r <= quad_l")
        if self.objective == "hilbert" and (self.num_blocks < 1 or self.block_size < 1):
            raise ConfigError("hilbert needs num_blocks, block_size >= 1")

    def resolved(self) -> Dict[str, str]:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            out[f.name] = str(v)
        return out

    def config_id(self) -> str:
        blob = ";".join(f"{k}={v}" for k, v in sorted(self.resolved().items())
                        if k not in ("out", "fail_on_divergence", "seeds", "log_interval"))
        return hashlib.sha1(blob.encode()).hexdigest()[:10]


_BOOL_KEYS = {"fail_on_divergence"}
_INT_KEYS = {"num_blocks", "block_size", "dim", "multi_n", "iters", "log_interval"}
_STR_KEYS = {"objective", "optimizer", "gradient", "mask", "theta0", "out"}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key == "seeds":
        return tuple(int(x) for x in raw.replace(",", " ").split())
    if key in _BOOL_KEYS:
        return raw.lower() in ("1", "true", "yes", "on")
    if key in _INT_KEYS:
        return int(raw)
    if key in _STR_KEYS:
        return raw
    if raw.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(raw)


def parse_config_text(text: str) -> Dict[str, object]:
    """Flat ``key = value`` lines; '#' starts a comment; blank lines ignored."""
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values: Dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    return values


def load_config(path: Optional[str] = None,
                overrides: Optional[Dict[str, object]] = None) -> ExperimentConfig:
    """Defaults, then file values, then explicit overrides; validated."""
    values: Dict[str, object] = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# objective construction and the reference minimum
# ---------------------------------------------------------------------------

def build_objective(cfg: ExperimentConfig) -> ObjectiveSpec:
    if cfg.objective == "hilbert":
        return hilbert_block_objective(cfg.num_blocks, cfg.block_size)
    if cfg.objective == "quadratic":
        return strongly_convex_quadratic(cfg.dim, cfg.quad_r, cfg.quad_l)
    return example31_objective()


_INFIMUM_CACHE: Dict[str, float] = {}


def reference_infimum(obj: ObjectiveSpec) -> float:
    """The objective's own infimum, or a deterministic numeric minimum.

    Used only for trace instrumentation (the gap column); the optimizers
    under test never see it.
    """
    if obj.infimum is not None:
        return obj.infimum
    if obj.name not in _INFIMUM_CACHE:
        from scipy.optimize import minimize

        res = minimize(obj.eval, np.zeros(obj.dim), jac=obj.grad, method="L-BFGS-B",
                       options={"maxiter": 2000, "ftol": 1e-18, "gtol": 1e-12})
        _INFIMUM_CACHE[obj.name] = float(res.fun)
    return _INFIMUM_CACHE[obj.name]


def mask_option(cfg: ExperimentConfig, d: int) -> MaskOption:
    if cfg.mask == "full":
        return Full()
    if cfg.mask == "single":
        return SingleCoordinate()
    if cfg.mask == "multi":
        return MultiCoordinate(cfg.multi_n)
    return Bernoulli(cfg.rho)


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass
class RunTrace:
    seed: int
    t: np.ndarray
    jbar: np.ndarray
    grad_norm: np.ndarray
    fevals: np.ndarray
    coords_updated: np.ndarray
    alpha_t: np.ndarray
    c_t: np.ndarray
    status: str
    total_fevals: int
    total_coords_updated: int
    iters_completed: int
    final_theta: Optional[np.ndarray] = None

    COLUMNS = ("t", "jbar", "grad_norm", "fevals", "coords_updated", "alpha_t", "c_t")

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write(",".join(self.COLUMNS) + "\n")
            for i in range(len(self.t)):
                f.write(f"{int(self.t[i])},{self.jbar[i]!r},{self.grad_norm[i]!r},"
                        f"{int(self.fevals[i])},{int(self.coords_updated[i])},"
                        f"{self.alpha_t[i]!r},{self.c_t[i]!r}\n")

    def median_jbar(self, frac_lo: float, frac_hi: float) -> float:
        """Median of the gap over rows with t in [frac_lo, frac_hi) * horizon."""
        horizon = self.t[-1]
        sel = (self.t >= frac_lo * horizon) & (self.t < frac_hi * horizon)
        if not np.any(sel):
            return math.nan
        return float(np.median(self.jbar[sel]))


def _init_theta(cfg: ExperimentConfig, seed: int, d: int) -> np.ndarray:
    if cfg.theta0 == "zeros":
        return np.zeros(d)
    rng = streams.stream(seed, 0, streams.INIT)
    return cfg.theta0_scale * rng.standard_normal(d)


def _make_state(cfg: ExperimentConfig, theta0: np.ndarray):
    if cfg.optimizer == SHB:
        return ShbState.initial(theta0, cfg.mu)
    if cfg.optimizer == SHB_VZ:
        return ShbVzState.initial(theta0, cfg.mu)
    return make_baseline(cfg.optimizer, theta0, mu=cfg.mu, beta1=cfg.beta1,
                         beta2=cfg.beta2, eps=cfg.eps_adam)


def _state_theta(state) -> np.ndarray:
    return state.theta


def _query_point(state) -> np.ndarray:
    if isinstance(state, (ShbState, ShbVzState)):
        return state.theta
    return gradient_point(state)


def _step(cfg: ExperimentConfig, state, phi: np.ndarray, a_t: float):
    if cfg.optimizer == SHB:
        return shb_step(state, phi, a_t)
    if cfg.optimizer == SHB_VZ:
        return shb_vz_step(state, phi, a_t)
    return baseline_step(state, phi, a_t)


def run_single(cfg: ExperimentConfig, seed: int) -> RunTrace:
    """One deterministic run; probes are instrumentation only."""
    obj = build_objective(cfg)
    d = obj.dim
    jstar = reference_infimum(obj)
    option = mask_option(cfg, d)
    sched = Schedule(alpha0=cfg.alpha0, tau=cfg.tau, p=cfg.p, c0=cfg.c0, q=cfg.q,
                     rho=cfg.rho if cfg.mask == "bernoulli" else 1.0,
                     horizon=cfg.iters)
    noisy = math.isfinite(cfg.snr_db)
    state = _make_state(cfg, _init_theta(cfg, seed, d))

    rows_t: List[int] = []
    rows_jbar: List[float] = []
    rows_gnorm: List[float] = []
    rows_fev: List[int] = []
    rows_coords: List[int] = []
    rows_alpha: List[float] = []
    rows_c: List[float] = []

    fevals_cum = 0
    coords_total = 0
    status = STATUS_COMPLETED
    t_reached = cfg.iters

    def probe(t: int, a_t: float, c_t: float, n_touched: int) -> None:
        theta = _state_theta(state)
        rows_t.append(t)
        rows_jbar.append(obj.eval(theta) - jstar)
        rows_gnorm.append(float(np.linalg.norm(obj.grad(theta))))
        rows_fev.append(fevals_cum)
        rows_coords.append(n_touched)
        rows_alpha.append(a_t)
        rows_c.append(c_t)

    for t in range(cfg.iters):
        a_t = float(sched_alpha(sched, t))
        c_t = float(sched_increment(sched, t))
        qp = _query_point(state)
        try:
            if cfg.gradient == EXACT:
                nm = NoiseModel(cfg.snr_db, GRADIENT,
                                streams.stream(seed, t, streams.GRAD_NOISE)) if noisy else None
                direction = exact_noisy_direction(obj, qp, nm)
                weights, touched, _ = draw_mask_weights(option, d,
                                                        streams.stream(seed, t, streams.MASK))
                phi = weights * direction.phi
            elif cfg.gradient == APPROX_A:
                weights, touched, _ = draw_mask_weights(option, d,
                                                        streams.stream(seed, t, streams.MASK))
                nm = NoiseModel(cfg.snr_db, FUNCTION,
                                streams.stream(seed, t, streams.FUNC_NOISE)) if noisy else None
                direction = approx_a_direction(obj, qp, c_t, nm, coords=touched)
                phi = weights * direction.phi
            else:
                draw = draw_rademacher(d, streams.stream(seed, t, streams.PERTURB))
                nm = NoiseModel(cfg.snr_db, FUNCTION,
                                streams.stream(seed, t, streams.FUNC_NOISE)) if noisy else None
                direction = approx_b_direction(obj, qp, c_t, nm, draw)
                weights, touched, _ = draw_mask_weights(option, d,
                                                        streams.stream(seed, t, streams.MASK))
                phi = weights * direction.phi

            if t % cfg.log_interval == 0:
                probe(t, a_t, c_t, len(touched))
            fevals_cum += direction.fevals
            coords_total += len(touched)
            state = _step(cfg, state, phi, a_t)
        except DivergenceError:
            status = STATUS_DIVERGED
            t_reached = t
            break

    theta_final = _state_theta(state)
    if np.all(np.isfinite(theta_final)):
        t_final = t_reached if status == STATUS_DIVERGED else cfg.iters
        probe(t_final, float(sched_alpha(sched, t_final)),
              float(sched_increment(sched, t_final)), 0)

    return RunTrace(
        seed=seed,
        t=np.array(rows_t, dtype=np.int64),
        jbar=np.array(rows_jbar),
        grad_norm=np.array(rows_gnorm),
        fevals=np.array(rows_fev, dtype=np.int64),
        coords_updated=np.array(rows_coords, dtype=np.int64),
        alpha_t=np.array(rows_alpha),
        c_t=np.array(rows_c),
        status=status,
        total_fevals=fevals_cum,
        total_coords_updated=coords_total,
        iters_completed=t_reached if status == STATUS_DIVERGED else cfg.iters,
        final_theta=theta_final if np.all(np.isfinite(theta_final)) else None,
    )


def run(cfg: ExperimentConfig) -> List[RunTrace]:
    """One trace per configured seed."""
    return [run_single(cfg, seed) for seed in cfg.seeds]


# ---------------------------------------------------------------------------
# summary / sweep
# ---------------------------------------------------------------------------

SUMMARY_COLUMNS = ("config_id", "optimizer", "mask", "gradient_mode", "rho",
                   "snr_db", "seed", "final_jbar", "total_fevals", "status")


def summary_row(cfg: ExperimentConfig, trace: RunTrace) -> Tuple:
    final_jbar = float(trace.jbar[-1]) if len(trace.jbar) else math.nan
    return (cfg.config_id(), cfg.optimizer, cfg.mask, cfg.gradient, cfg.rho,
            cfg.snr_db, trace.seed, final_jbar, trace.total_fevals, trace.status)


def write_summary(rows: Sequence[Tuple], path) -> None:
    with open(path, "w") as f:
        f.write(",".join(SUMMARY_COLUMNS) + "\n")
        for row in rows:
            f.write(",".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")


def trace_path(out_dir: Path, cfg: ExperimentConfig, seed: int) -> Path:
    return out_dir / f"trace_{cfg.config_id()}_{cfg.optimizer}_seed{seed}.csv"


def run_and_save(cfg: ExperimentConfig) -> List[RunTrace]:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    traces = run(cfg)
    rows = []
    for tr in traces:
        tr.to_csv(trace_path(out_dir, cfg, tr.seed))
        rows.append(summary_row(cfg, tr))
    write_summary(rows, out_dir / "summary.csv")
    return traces


SWEEP_RHOS = (0.1, 0.2, 0.5, 1.0)
SWEEP_SNRS = (10.0, 20.0, 40.0)


def sweep(base: ExperimentConfig, rhos: Sequence[float] = SWEEP_RHOS,
          snrs: Sequence[float] = SWEEP_SNRS) -> Tuple[List[Tuple], Dict]:
    """Cross product of update rates and noise levels; failures don't stop it."""
    rows: List[Tuple] = []
    traces: Dict[Tuple[float, float, int], RunTrace] = {}
    out_dir = Path(base.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rho in rhos:
        for snr in snrs:
            cfg = replace(base, mask="bernoulli", rho=rho, snr_db=snr)
            cfg.validate()
            for seed in cfg.seeds:
                tr = run_single(cfg, seed)
                tr.to_csv(trace_path(out_dir, cfg, seed))
                rows.append(summary_row(cfg, tr))
                traces[(rho, snr, seed)] = tr
    write_summary(rows, out_dir / "summary.csv")
    return rows, traces


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def _suite_moments(rng: np.random.Generator) -> List[analysis.CheckRow]:
    rows = []
    for d in (2, 3, 4):
        phi = 1.0 + np.arange(d)
        options = [SingleCoordinate(), Bernoulli(0.5), Bernoulli(0.25)]
        options += [MultiCoordinate(n) for n in (1, 2, 3) if n <= d]
        for option in options:
            ok, detail = analysis.enumerated_mask_check(phi, option)
            err = max(detail["mean_abs_err"], detail["second_abs_err"],
                      detail["cv_abs_err"])
            rows.append(analysis.CheckRow(
                "mask_moments_enumerated", f"{option}/d={d}", err, 0.0, 0.0,
                "pass" if ok else "fail"))
    d = 16
    dist = analysis.GaussianDirection(mean=np.linspace(-1.0, 2.0, d), sigma=0.5)
    for option in (SingleCoordinate(), MultiCoordinate(3), Bernoulli(0.25)):
        rep = analysis.verify_masked_moments(dist, option, trials=1_000_000,
                                             tolerance=0.02, rng=rng)
        rows.append(analysis.CheckRow(
            "mask_moments_mc", f"{option}/d={d}",
            rep.measured.second_moment, rep.predicted.second_moment,
            rep.measured.std_error, "pass" if rep.passed else "fail"))
    return rows


def _bias_instances():
    yield strongly_convex_quadratic(6, 0.5, 2.0)
    yield example31_objective()
    yield hilbert_block_objective(1, 4)


def _suite_bias(rng: np.random.Generator, pairs: int = 100) -> List[analysis.CheckRow]:
    rows = []
    for obj in _bias_instances():
        for mode in (APPROX_A, APPROX_B):
            worst = 0.0
            violations = 0
            for _ in range(pairs):
                theta = rng.normal(0.0, 2.0, size=obj.dim)
                c_t = 10.0 ** rng.uniform(-4, -0.5)
                chk = analysis.verify_bias_bound(mode, obj, theta, c_t)
                worst = max(worst, chk.margin)
                violations += 0 if chk.passed else 1
            rows.append(analysis.CheckRow(
                f"bias_bound_{mode}", obj.name, worst, 1.0, 0.0,
                "pass" if violations == 0 else "fail"))
    return rows


def _suite_cv(rng: np.random.Generator) -> List[analysis.CheckRow]:
    rows = []
    for obj in (strongly_convex_quadratic(2, 1.0, 2.0), hilbert_block_objective(1, 2)):
        for c_t in (1e-3, 1e-1):
            theta = rng.normal(0.0, 1.0, size=obj.dim)
            nm = NoiseModel(20.0, FUNCTION, streams.stream(7, 0, streams.FUNC_NOISE))
            rep = analysis.verify_cv_bound_b(obj, theta, c_t, nm)
            rows.append(analysis.CheckRow(
                "cv_bound_enumerated", f"{obj.name}/c={c_t}",
                rep.measured_cv, rep.bound_printed, 0.0,
                "pass" if rep.passed_printed else "fail"))
    obj = strongly_convex_quadratic(16, 1.0, 3.0)
    theta = rng.normal(0.0, 1.0, size=16)
    nm = NoiseModel(20.0, FUNCTION, streams.stream(11, 0, streams.FUNC_NOISE))
    rep = analysis.verify_cv_bound_b(obj, theta, 1e-2, nm, trials=40_000, rng=rng)
    rows.append(analysis.CheckRow(
        "cv_bound_mc_corrected", f"{obj.name}/d=16",
        rep.measured_cv, rep.bound_corrected, rep.std_error,
        "pass" if rep.passed_corrected else "fail"))
    return rows


def equivalence_deviation(seed: int, steps: int = 10_000) -> float:
    """Max componentwise gap between the direct and (v, z) recursions."""
    obj = strongly_convex_quadratic(20, 1.0, 5.0)
    d = obj.dim
    theta0 = streams.stream(seed, 0, streams.INIT).standard_normal(d)
    direct = ShbState.initial(theta0, mu=0.9)
    refactored = ShbVzState.initial(theta0, mu=0.9)
    option = Bernoulli(0.5)
    sched = Schedule(alpha0=0.01, tau=200.0, p=1.0)
    worst = 0.0
    for t in range(steps):
        a_t = float(sched_alpha(sched, t))
        nm = NoiseModel(20.0, GRADIENT, streams.stream(seed, t, streams.GRAD_NOISE))
        direction = exact_noisy_direction(obj, direct.theta, nm)
        weights, _, _ = draw_mask_weights(option, d, streams.stream(seed, t, streams.MASK))
        phi = weights * direction.phi
        direct = shb_step(direct, phi, a_t)
        refactored = shb_vz_step(refactored, phi, a_t)
        worst = max(worst, float(np.max(np.abs(direct.theta - refactored.theta))))
    return worst


def _suite_equivalence() -> List[analysis.CheckRow]:
    rows = []
    for seed in range(10):
        dev = equivalence_deviation(seed)
        rows.append(analysis.CheckRow("vz_equivalence", f"seed={seed}", dev, 1e-9,
                                      0.0, "pass" if dev <= 1e-9 else "fail"))
    return rows


def _suite_rates() -> List[analysis.CheckRow]:
    rows = []
    base = ExperimentConfig(
        objective="quadratic", dim=100, quad_r=1.0, quad_l=10.0,
        optimizer=SHB, mu=0.9, gradient=EXACT, mask="full",
        snr_db=20.0, alpha0=0.01, tau=1.0, c0=1e-4, q=0.0,
        iters=200_000, seeds=(0,), log_interval=50, theta0="gaussian",
        theta0_scale=1.0,
    )
    cfg = replace(base, p=0.75)
    cfg.validate()
    tr = run_single(cfg, 0)
    fit = analysis.rate_fit(tr, "suboptimality")
    rows.append(analysis.CheckRow("rate_gap_decay", "quadratic/p=0.75",
                                  fit.slope, -0.4, 0.0,
                                  "pass" if fit.defined and fit.slope <= -0.4 else "fail"))
    cfg = replace(base, p=0.5)
    cfg.validate()
    tr = run_single(cfg, 0)
    fit = analysis.rate_fit(tr, "min_grad_sq")
    rows.append(analysis.CheckRow("rate_min_grad_sq", "quadratic/p=0.5",
                                  fit.slope, -0.4, 0.0,
                                  "pass" if fit.defined and fit.slope <= -0.4 else "fail"))
    return rows


VERIFY_SUITES = ("moments", "bias", "cv", "rates", "equivalence", "all")


def verify(suite: str, out_dir: Optional[str] = None) -> Tuple[List[analysis.CheckRow], bool]:
    if suite not in VERIFY_SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {VERIFY_SUITES}")
    rng = np.random.default_rng(12345)
    rows: List[analysis.CheckRow] = []
    if suite in ("moments", "all"):
        rows += _suite_moments(rng)
    if suite in ("bias", "all"):
        rows += _suite_bias(rng)
    if suite in ("cv", "all"):
        rows += _suite_cv(rng)
    if suite in ("equivalence", "all"):
        rows += _suite_equivalence()
    if suite in ("rates", "all"):
        rows += _suite_rates()
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        analysis.rows_to_csv(rows, out / f"verify_{suite}.csv")
    return rows, all(r.passed for r in rows)
