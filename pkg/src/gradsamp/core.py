"""Shared domain types: oracle evaluations, solver parameters, iteration
records, solve reports, and the termination-status taxonomy."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np


class GsError(RuntimeError):
    """Hard solver error (oracle returned garbage, perturbation search
    exhausted, and similar surfaced-rather-than-hidden failures)."""


class InvalidParams(ValueError):
    """Raised by validate_params; carries every violated constraint."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class OracleEval:
    """Objective value, gradient (when it exists), and a differentiability
    flag at a single point."""

    value: float
    gradient: Optional[np.ndarray]
    differentiable: bool

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise GsError(f"oracle returned non-finite value {self.value!r}")
        if self.differentiable and self.gradient is None:
            raise ValueError("differentiable eval must carry a gradient")
        if not self.differentiable and self.gradient is not None:
            raise ValueError("nondifferentiable eval must not carry a gradient")
        if self.gradient is not None:
            g = np.asarray(self.gradient, dtype=float)
            if not np.all(np.isfinite(g)):
                raise GsError("oracle returned non-finite gradient")
            object.__setattr__(self, "gradient", g)


DIRECTION_MODES = ("nonnormalized", "trust_region")
LINE_SEARCH_MODES = ("monotone", "nonmonotone", "limited")
SAMPLING_MODES = ("fixed_m", "adaptive")
SCALING_MODES = ("identity", "bb", "matrix")
NONDIFF_STRATEGIES = ("perturb_iterate", "perturb_direction", "drop_center_gradient")


@dataclass(frozen=True)
class VariantConfig:
    """Variant switches for the solver loop.

    delta0 is the nonmonotone slack scale; None means "resolve at solve
    start" (0 unless nondiff_strategy needs slack, see solver module).
    matrix holds the fixed H used by scaling_mode="matrix"; None means
    the identity.
    """

    direction_mode: str = "nonnormalized"
    line_search_mode: str = "monotone"
    delta0: Optional[float] = None
    max_ls_evals: int = 50
    sampling_mode: str = "fixed_m"
    m_min: int = 2
    m_max: int = 32
    reuse_gradients: bool = False
    scaling_mode: str = "identity"
    alpha_min: float = 1e-3
    alpha_max: float = 1e3
    lambda_min: float = 1e-4
    lambda_max: float = 1e4
    matrix: Optional[np.ndarray] = None
    nondiff_strategy: str = "perturb_iterate"


@dataclass(frozen=True)
class GsParams:
    """All inputs of the sampling solver: initial radius epsilon0, target
    nu0, sample size m, Armijo beta, backtracking gamma, stopping
    tolerances, reduction factors theta, plus artifact plumbing (seed,
    t_min, f_floor, iteration cap, variant switches)."""

    epsilon0: float
    nu0: float = 1e-6
    sample_size: int = 4
    beta: float = 1e-4
    gamma: float = 0.5
    epsilon_opt: float = 1e-6
    nu_opt: float = 1e-6
    theta_eps: float = 0.1
    theta_nu: float = 0.1
    max_iter: int = 10000
    seed: int = 0
    t_min: float = 1e-16
    f_floor: float = -1e12
    variant: VariantConfig = field(default_factory=VariantConfig)


def default_params(x0, **overrides) -> GsParams:
    """Defaults scaled to the start point: epsilon0 = 0.1*(1+||x0||_inf),
    sample_size m = 2n (>= n+1). Any field can be overridden."""
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    base = dict(
        epsilon0=0.1 * (1.0 + (float(np.max(np.abs(x0))) if n else 0.0)),
        sample_size=max(2 * n, n + 1),
    )
    base.update(overrides)
    if "variant" in base and isinstance(base["variant"], dict):
        base["variant"] = VariantConfig(**base["variant"])
    return GsParams(**base)


def param_violations(p: GsParams, n: int) -> list[str]:
    """Every violated constraint, by name; empty list when p is valid."""
    errs = []
    v = p.variant
    if not (math.isfinite(p.epsilon0) and p.epsilon0 > 0):
        errs.append("epsilon0 must be positive")
    if not (math.isfinite(p.nu0) and p.nu0 >= 0):
        errs.append("nu0 must be nonnegative")
    if v.sampling_mode == "fixed_m" and p.sample_size < n + 1:
        errs.append("m >= n+1 required (fixed_m sampling)")
    if p.sample_size < 1:
        errs.append("sample_size must be >= 1")
    if not (0 < p.beta < 1):
        errs.append("beta must lie in (0,1)")
    if not (0 < p.gamma < 1):
        errs.append("gamma must lie in (0,1)")
    if not (math.isfinite(p.epsilon_opt) and p.epsilon_opt >= 0):
        errs.append("epsilon_opt must be nonnegative")
    if not (math.isfinite(p.nu_opt) and p.nu_opt >= 0):
        errs.append("nu_opt must be nonnegative")
    if not (0 < p.theta_eps <= 1):
        errs.append("theta_eps must lie in (0,1]")
    if not (0 < p.theta_nu <= 1):
        errs.append("theta_nu must lie in (0,1]")
    if p.max_iter < 1:
        errs.append("max_iter must be >= 1")
    if p.seed < 0:
        errs.append("seed must be an unsigned integer")
    if not (0 < p.t_min <= 1):
        errs.append("t_min must lie in (0,1]")
    if not math.isfinite(p.f_floor):
        errs.append("f_floor must be finite")
    if v.direction_mode not in DIRECTION_MODES:
        errs.append(f"direction_mode must be one of {DIRECTION_MODES}")
    if v.line_search_mode not in LINE_SEARCH_MODES:
        errs.append(f"line_search_mode must be one of {LINE_SEARCH_MODES}")
    if v.sampling_mode not in SAMPLING_MODES:
        errs.append(f"sampling_mode must be one of {SAMPLING_MODES}")
    if v.scaling_mode not in SCALING_MODES:
        errs.append(f"scaling_mode must be one of {SCALING_MODES}")
    if v.nondiff_strategy not in NONDIFF_STRATEGIES:
        errs.append(f"nondiff_strategy must be one of {NONDIFF_STRATEGIES}")
    if v.delta0 is not None and not (math.isfinite(v.delta0) and v.delta0 >= 0):
        errs.append("delta0 must be nonnegative")
    if v.max_ls_evals < 1:
        errs.append("max_ls_evals must be >= 1")
    if v.sampling_mode == "adaptive" and not (1 <= v.m_min <= v.m_max):
        errs.append("adaptive sampling requires 1 <= m_min <= m_max")
    if v.scaling_mode == "bb" and not (0 < v.alpha_min <= v.alpha_max):
        errs.append("bb scaling requires 0 < alpha_min <= alpha_max")
    if v.scaling_mode == "matrix" and not (0 < v.lambda_min <= v.lambda_max):
        errs.append("matrix scaling requires 0 < lambda_min <= lambda_max")
    if v.nondiff_strategy == "drop_center_gradient":
        if v.line_search_mode != "nonmonotone":
            errs.append("drop_center_gradient requires line_search_mode = nonmonotone")
        if v.delta0 is not None and v.delta0 <= 0:
            errs.append("drop_center_gradient requires delta0 > 0")
    return errs


def validate_params(p: GsParams, n: int) -> GsParams:
    """Return p unchanged when every range constraint holds; raise
    InvalidParams listing all violations otherwise. Idempotent."""
    errs = param_violations(p, n)
    if errs:
        raise InvalidParams(errs)
    return p


class Status(str, Enum):
    TOLERANCE_MET = "ToleranceMet"
    GRADIENT_ZERO = "GradientZero"
    MAX_ITERATIONS = "MaxIterations"
    UNBOUNDED = "Unbounded"
    LINE_SEARCH_FAILURE = "LineSearchFailure"


@dataclass(frozen=True)
class IterationRecord:
    """One loop pass: the iterate x^k it started from, the min-norm hull
    element g^k found there, the radii in force, and what the step did.

    t_k is the effective scalar along -g_k (so x_{k+1} ~ x - t_k*g_k before
    any perturbation, in every direction mode); it is 0 exactly on
    radius-reduction iterations, null steps, and terminal records."""

    k: int
    x: np.ndarray
    f_x: float
    grad_x: Optional[np.ndarray]
    epsilon_k: float
    nu_k: float
    g_k: np.ndarray
    g_norm: float
    t_k: float
    n_fevals: int
    n_gevals: int
    perturbed: bool
    null_step: bool


@dataclass(frozen=True)
class SolveReport:
    status: Status
    x_final: np.ndarray
    f_final: float
    certificate: tuple[float, float]  # (||g||, epsilon) at exit
    trace: list[IterationRecord]

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def n_fevals(self) -> int:
        return sum(r.n_fevals for r in self.trace)

    @property
    def n_gevals(self) -> int:
        return sum(r.n_gevals for r in self.trace)


def classify_termination(state: IterationRecord, p: GsParams) -> Status:
    """Map the last record of a completed run to a status.

    An exact g = 0 is the strongest certificate (0 lies in the sampled
    hull); it is reported as GradientZero except when positive stopping
    tolerances were set and both were met, which reports ToleranceMet so
    that tolerance-driven runs carry a uniform status."""
    exact_zero = state.g_norm == 0.0
    if exact_zero and p.nu_opt == 0.0:
        return Status.GRADIENT_ZERO
    if state.g_norm <= p.nu_opt and state.epsilon_k <= p.epsilon_opt:
        return Status.TOLERANCE_MET
    if exact_zero:
        return Status.GRADIENT_ZERO
    if state.f_x <= p.f_floor:
        return Status.UNBOUNDED
    if state.t_k == 0.0 and not state.null_step and state.g_norm > state.nu_k:
        return Status.LINE_SEARCH_FAILURE
    return Status.MAX_ITERATIONS


# -- flat JSON config ------------------------------------------------------

def variant_to_dict(v: VariantConfig) -> dict:
    d = {
        "direction_mode": v.direction_mode,
        "line_search_mode": v.line_search_mode,
        "delta0": v.delta0,
        "max_ls_evals": v.max_ls_evals,
        "sampling_mode": v.sampling_mode,
        "m_min": v.m_min,
        "m_max": v.m_max,
        "reuse_gradients": v.reuse_gradients,
        "scaling_mode": v.scaling_mode,
        "alpha_min": v.alpha_min,
        "alpha_max": v.alpha_max,
        "lambda_min": v.lambda_min,
        "lambda_max": v.lambda_max,
        "nondiff_strategy": v.nondiff_strategy,
    }
    if v.matrix is not None:
        d["matrix"] = np.asarray(v.matrix, dtype=float).tolist()
    return d


def params_to_dict(p: GsParams) -> dict:
    return {
        "epsilon0": p.epsilon0,
        "nu0": p.nu0,
        "sample_size": p.sample_size,
        "beta": p.beta,
        "gamma": p.gamma,
        "epsilon_opt": p.epsilon_opt,
        "nu_opt": p.nu_opt,
        "theta_eps": p.theta_eps,
        "theta_nu": p.theta_nu,
        "max_iter": p.max_iter,
        "seed": p.seed,
        "t_min": p.t_min,
        "f_floor": p.f_floor,
        "variant": variant_to_dict(p.variant),
    }


def params_from_dict(d: dict) -> GsParams:
    d = dict(d)
    vd = d.pop("variant", None)
    variant = VariantConfig()
    if vd:
        vd = dict(vd)
        if vd.get("matrix") is not None:
            vd["matrix"] = np.asarray(vd["matrix"], dtype=float)
        variant = VariantConfig(**vd)
    return GsParams(variant=variant, **d)


def with_overrides(p: GsParams, **kw) -> GsParams:
    variant_kw = kw.pop("variant", None)
    if variant_kw is not None and isinstance(variant_kw, dict):
        variant_kw = replace(p.variant, **variant_kw)
    if variant_kw is not None:
        kw["variant"] = variant_kw
    return replace(p, **kw)


def record_to_dict(r: IterationRecord) -> dict:
    """JSON-ready per-iteration dict with a fixed field order, so dumping a
    trace twice gives byte-identical lines."""
    return {
        "k": r.k,
        "x": [float(v) for v in r.x],
        "f_x": float(r.f_x),
        "grad_x": None if r.grad_x is None else [float(v) for v in r.grad_x],
        "epsilon_k": float(r.epsilon_k),
        "nu_k": float(r.nu_k),
        "g_k": [float(v) for v in r.g_k],
        "g_norm": float(r.g_norm),
        "t_k": float(r.t_k),
        "n_fevals": r.n_fevals,
        "n_gevals": r.n_gevals,
        "perturbed": r.perturbed,
        "null_step": r.null_step,
    }


def record_from_dict(d: dict) -> IterationRecord:
    return IterationRecord(
        k=int(d["k"]),
        x=np.asarray(d["x"], dtype=float),
        f_x=float(d["f_x"]),
        grad_x=None if d.get("grad_x") is None else np.asarray(d["grad_x"], dtype=float),
        epsilon_k=float(d["epsilon_k"]),
        nu_k=float(d["nu_k"]),
        g_k=np.asarray(d["g_k"], dtype=float),
        g_norm=float(d["g_norm"]),
        t_k=float(d["t_k"]),
        n_fevals=int(d["n_fevals"]),
        n_gevals=int(d["n_gevals"]),
        perturbed=bool(d["perturbed"]),
        null_step=bool(d["null_step"]),
    )


def trace_ndjson(report: SolveReport) -> str:
    """One JSON object per iteration, newline separated."""
    lines = [json.dumps(record_to_dict(r)) for r in report.trace]
    return "\n".join(lines) + "\n"


def report_to_dict(report: SolveReport, include_trace: bool = True) -> dict:
    d = {
        "status": report.status.value,
        "x_final": [float(v) for v in report.x_final],
        "f_final": float(report.f_final),
        "certificate": {
            "g_norm": float(report.certificate[0]),
            "epsilon": float(report.certificate[1]),
        },
        "iterations": report.iterations,
        "n_fevals": report.n_fevals,
        "n_gevals": report.n_gevals,
    }
    if include_trace:
        d["trace"] = [record_to_dict(r) for r in report.trace]
    return d
