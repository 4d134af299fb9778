"""Gradient-sampling solver for nonsmooth, nonconvex minimization.

The solver minimizes functions given through an oracle that returns the
value, the gradient where one exists, and a differentiability flag. Each
iteration samples gradients in a shrinking ball, takes the smallest convex
combination of the bundle as the search direction, and backtracks; the
returned certificate (||g||, epsilon) bounds how close the final iterate is
to stationarity.
"""

from .core import (
    GsError,
    GsParams,
    InvalidParams,
    IterationRecord,
    OracleEval,
    SolveReport,
    Status,
    VariantConfig,
    classify_termination,
    default_params,
    param_violations,
    params_from_dict,
    params_to_dict,
    record_from_dict,
    record_to_dict,
    report_to_dict,
    trace_ndjson,
    validate_params,
    with_overrides,
)
from .linesearch import LineSearchOutcome, armijo_backtrack, delta_sequence
from .minnorm import (
    GradientBundle,
    MinNormSolution,
    check_optimality,
    min_norm_point,
    qp_tolerance,
    warm_start_augment,
)
from .oracle_checks import brute_force_min_norm, fd_gradient
from .problems import (
    FiniteMaxSpec,
    Piece,
    Problem,
    corpus,
    eval_finite_max,
    load_problem_file,
    make_problem,
    problem_accepts_dim,
    problem_from_pieces,
    problem_names,
)
from .sampling import BallSampler, perturb_within, sample_ball
from .solver import (
    CountingOracle,
    SolverState,
    StepEvent,
    VARIANT_PRESETS,
    adaptive_sample_count,
    bb_alpha,
    compute_direction,
    gs_step,
    handle_nondifferentiable,
    preset_variant,
    reuse_cached_gradients,
    safeguard_matrix,
    solve,
    steepest_descent,
    variant_names,
)

__version__ = "0.1.0"

__all__ = [
    "BallSampler",
    "CountingOracle",
    "FiniteMaxSpec",
    "GradientBundle",
    "GsError",
    "GsParams",
    "InvalidParams",
    "IterationRecord",
    "LineSearchOutcome",
    "MinNormSolution",
    "OracleEval",
    "Piece",
    "Problem",
    "SolveReport",
    "SolverState",
    "Status",
    "StepEvent",
    "VARIANT_PRESETS",
    "VariantConfig",
    "adaptive_sample_count",
    "armijo_backtrack",
    "bb_alpha",
    "brute_force_min_norm",
    "check_optimality",
    "classify_termination",
    "compute_direction",
    "corpus",
    "default_params",
    "delta_sequence",
    "eval_finite_max",
    "fd_gradient",
    "gs_step",
    "handle_nondifferentiable",
    "load_problem_file",
    "make_problem",
    "min_norm_point",
    "param_violations",
    "params_from_dict",
    "params_to_dict",
    "perturb_within",
    "preset_variant",
    "problem_accepts_dim",
    "problem_from_pieces",
    "problem_names",
    "qp_tolerance",
    "record_from_dict",
    "record_to_dict",
    "report_to_dict",
    "reuse_cached_gradients",
    "safeguard_matrix",
    "sample_ball",
    "solve",
    "steepest_descent",
    "trace_ndjson",
    "validate_params",
    "variant_names",
    "warm_start_augment",
    "with_overrides",
]
