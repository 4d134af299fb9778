"""The sampling solver main loop, with its variant hooks: radius/target
reduction, termination, differentiability handling, trust-region scaling,
adaptive sampling with gradient re-use, and safeguarded scalings.

Every step is parametrized by an effective scalar t_k along -g_k, whatever
the direction mode: the raw backtracking t over a scaled search vector s
is converted through t_k = t * (||s|| / ||g||) for the collinear modes, so
the recorded sufficient-decrease inequality
    f(x_{k+1}) < f(x_k) - beta * t_k * ||g_k||^2
reads the same for all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    GsError,
    GsParams,
    IterationRecord,
    OracleEval,
    SolveReport,
    Status,
    VariantConfig,
    classify_termination,
    default_params,
    validate_params,
)
from .linesearch import armijo_backtrack, delta_sequence
from .minnorm import GradientBundle, MinNormSolution, min_norm_point
from .sampling import BallSampler, perturb_within, sample_ball

CACHE_CAP_FACTOR = 5       # cached gradient pairs kept: at most 5n, oldest out
RESAMPLE_ATTEMPTS = 10     # per sampled point reported nondifferentiable
PERTURB_ATTEMPTS = 50      # perturbed-iterate search, bound shrinking x0.1
X0_PERTURB_ATTEMPTS = 100  # nondifferentiable start point repair


class CountingOracle:
    """Wraps a problem oracle and counts work: n_fevals is every call
    (value-only or full), n_gevals the full calls that returned a gradient."""

    def __init__(self, oracle: Callable[[np.ndarray], OracleEval]):
        self._oracle = oracle
        self.n_fevals = 0
        self.n_gevals = 0

    def value(self, x) -> float:
        self.n_fevals += 1
        return self._oracle(np.asarray(x, dtype=float)).value

    def full(self, x) -> OracleEval:
        ev = self._oracle(np.asarray(x, dtype=float))
        self.n_fevals += 1
        if ev.differentiable:
            self.n_gevals += 1
        return ev


@dataclass
class CacheEntry:
    uid: int
    point: np.ndarray
    grad: np.ndarray


@dataclass
class SolverState:
    k: int
    x: np.ndarray
    eval: OracleEval
    epsilon: float
    nu: float
    sampler: BallSampler
    cache: list = field(default_factory=list)
    alpha: float = 1.0                      # current bb scalar
    H: Optional[np.ndarray] = None          # safeguarded matrix-mode H
    sample_count: int = 0
    delta0: float = 0.0
    next_uid: int = 0
    lam_by_uid: dict = field(default_factory=dict)
    warm_ok: bool = False


@dataclass(frozen=True)
class StepEvent:
    """Per-iteration observer payload: the bundle, the QP solution, the
    record, and the points each bundle column was evaluated at."""

    k: int
    bundle: GradientBundle
    solution: MinNormSolution
    record: IterationRecord
    points: list


def _solver_qp_tol(bundle: GradientBundle) -> float:
    """QP certificate tolerance the solver drives min_norm_point to:
    1e-10 relative to the squared bundle scale, so the certificate stays
    meaningful when the gradients shrink toward stationarity (an absolute
    floor would let ||g||^2 drop below it and return junk directions)."""
    nrm = float(np.max(np.linalg.norm(bundle.matrix, axis=0)))
    return 1e-10 * nrm * nrm if nrm > 0.0 else 1e-30


def reuse_cached_gradients(cache: list, x, epsilon_k: float) -> list:
    """Exactly the cached (point, gradient) pairs whose point lies in the
    closed ball B(x, epsilon_k)."""
    x = np.asarray(x, dtype=float)
    return [e for e in cache if float(np.linalg.norm(e.point - x)) <= epsilon_k]


def adaptive_sample_count(prev_count: int, was_null: bool, m_min: int, m_max: int) -> int:
    """Next fresh-sample count: reset to m_min after a step that moved (or
    reduced the radius), double up to m_max after a null step."""
    if was_null:
        return min(2 * max(prev_count, 1), m_max)
    return m_min


def compute_direction(g, epsilon_k: float, scaling, variant) -> np.ndarray:
    """Search direction d (the step is x + t*d): -g nonnormalized,
    -epsilon_k*g/||g|| under trust_region, -g/alpha under bb,
    -H^{-1}g under matrix scaling."""
    g = np.asarray(g, dtype=float)
    if variant.direction_mode == "trust_region":
        nrm = float(np.linalg.norm(g))
        if nrm == 0.0:
            raise ValueError("trust_region direction undefined at g = 0")
        return -(epsilon_k / nrm) * g
    if variant.scaling_mode == "bb":
        alpha = 1.0 if scaling is None else float(scaling)
        alpha = min(max(alpha, variant.alpha_min), variant.alpha_max)
        return -g / alpha
    if variant.scaling_mode == "matrix":
        H = np.eye(g.size) if scaling is None else np.asarray(scaling, dtype=float)
        return -np.linalg.solve(H, g)
    return -g


def bb_alpha(s, y, alpha_min: float, alpha_max: float) -> float:
    """Two-point scaling (s'y)/(s's) clamped to [alpha_min, alpha_max];
    falls back to 1 on zero displacement or nonpositive curvature."""
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    ss = float(s @ s)
    sy = float(s @ y)
    if ss == 0.0 or sy <= 0.0:
        return 1.0
    return float(min(max(sy / ss, alpha_min), alpha_max))


def safeguard_matrix(H, lambda_min: float, lambda_max: float) -> np.ndarray:
    """H with its eigenvalues clamped into [lambda_min, lambda_max]; the
    result is symmetric positive definite. Symmetric input required."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise GsError("safeguard_matrix requires a square matrix")
    if not np.allclose(H, H.T, rtol=0.0, atol=1e-12 * (1.0 + float(np.abs(H).max()))):
        raise GsError("safeguard_matrix requires a symmetric matrix")
    w, V = np.linalg.eigh(H)
    w = np.clip(w, lambda_min, lambda_max)
    out = (V * w) @ V.T
    return 0.5 * (out + out.T)


def handle_nondifferentiable(tentative, x, t_k, g, epsilon_k, f_x, oracle, sampler, p, delta_k=0.0):
    """Perturbed-iterate fallback for a tentative point where the oracle
    reports nondifferentiability: search the ball of radius
    min{t_k, epsilon_k} * ||g||_2 around the tentative point for a
    differentiable replacement that still achieves the sufficient decrease
    f < f_x - beta*t_k*||g||^2 (+ delta_k), shrinking the ball x0.1 on each
    failure. Returns (point, eval); exhausting the attempts is a hard error
    (a probability-zero event worth surfacing, not hiding)."""
    g = np.asarray(g, dtype=float)
    g_norm_sq = float(g @ g)
    bound = min(t_k, epsilon_k) * math.sqrt(g_norm_sq)
    if not bound > 0.0:
        raise GsError("perturbation bound collapsed to zero")
    target = f_x - p.beta * t_k * g_norm_sq + delta_k
    for _ in range(PERTURB_ATTEMPTS):
        y = perturb_within(tentative, bound, sampler)
        ev = oracle.full(y)
        if ev.differentiable and ev.value < target:
            return y, ev
        bound *= 0.1
    raise GsError(
        f"no differentiable point with sufficient decrease within "
        f"{PERTURB_ATTEMPTS} perturbation attempts of {np.asarray(tentative).tolist()}"
    )


def _perturb_direction(g, grad_x, sampler) -> tuple[np.ndarray, bool]:
    """Pre-line-search direction perturbation: g + delta with
    ||delta|| <= min(1e-8, 0.1)*||g||, accepted only while the descent
    certificate keeps margin grad_x' g_tilde >= 0.5*||g||^2; shrinks and
    retries, giving up (unperturbed) after 50 tries."""
    g = np.asarray(g, dtype=float)
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0.0:
        return g, False
    margin = 0.5 * g_norm * g_norm
    mag = min(1e-8, 0.1) * g_norm
    for _ in range(50):
        cand = perturb_within(g, mag, sampler)
        if float(grad_x @ cand) >= margin:
            return cand, True
        mag *= 0.1
    return g, False


def gs_step(state: SolverState, p: GsParams, oracle: CountingOracle,
            observer=None, force_center_only: bool = False):
    """One loop pass: sample, build the bundle, solve the min-norm QP, then
    terminate / reduce radii / line-search and move. Mutates state; returns
    (record, stop) where stop means the run is over (tolerances met, exact
    zero hull element, or a failed monotone line search)."""
    v = p.variant
    n = state.x.size
    drop_center = v.nondiff_strategy == "drop_center_gradient"
    fev0, gev0 = oracle.n_fevals, oracle.n_gevals
    x = state.x
    f_x = state.eval.value
    grad_x = state.eval.gradient
    eps_k, nu_k = state.epsilon, state.nu  # the radii this iteration runs at

    # Sample the ball, resampling any point the oracle flags
    center_only = force_center_only and state.k == 0
    fresh_pts: list = []
    fresh_evs: list = []
    if not center_only:
        fresh_pts = sample_ball(x, eps_k, state.sample_count, state.sampler)
        for j in range(len(fresh_pts)):
            pt = fresh_pts[j]
            ev = oracle.full(pt)
            attempts = 0
            while not ev.differentiable:
                attempts += 1
                if attempts > RESAMPLE_ATTEMPTS:
                    raise GsError(
                        f"sampled point nondifferentiable after {RESAMPLE_ATTEMPTS} resamples"
                    )
                pt = sample_ball(x, eps_k, 1, state.sampler)[0]
                ev = oracle.full(pt)
            fresh_pts[j] = pt
            fresh_evs.append(ev)
    reused = (
        reuse_cached_gradients(state.cache, x, eps_k)
        if (v.reuse_gradients and not center_only)
        else []
    )

    # Assemble the bundle: center gradient, re-used cache entries, fresh samples
    cols, tags, uids, col_points = [], [], [], []
    if not drop_center:
        if grad_x is None:
            raise GsError("center gradient unavailable outside drop_center_gradient mode")
        cols.append(grad_x)
        tags.append("center")
        uids.append(-1)
        col_points.append(x)
    for e in reused:
        cols.append(e.grad)
        tags.append(f"cache:{e.uid}")
        uids.append(e.uid)
        col_points.append(e.point)
    for pt, ev in zip(fresh_pts, fresh_evs):
        uid = state.next_uid
        state.next_uid += 1
        cols.append(ev.gradient)
        tags.append(f"sample:{uid}")
        uids.append(uid)
        col_points.append(pt)
        state.cache.append(CacheEntry(uid, pt, ev.gradient))
    cap = CACHE_CAP_FACTOR * n
    if len(state.cache) > cap:
        del state.cache[: len(state.cache) - cap]
    if not cols:
        raise GsError("empty gradient bundle")
    bundle = GradientBundle.from_columns(cols, tags)

    warm = None
    if state.warm_ok and state.lam_by_uid:
        w = np.array([state.lam_by_uid.get(uid, 0.0) for uid in uids])
        total = w.sum()
        if total > 0:
            warm = w / total
    sol = min_norm_point(bundle, _solver_qp_tol(bundle), warm=warm)
    g = sol.g
    g_norm = float(np.linalg.norm(g))
    state.lam_by_uid = {uid: float(l) for uid, l in zip(uids, sol.lam) if l > 0.0}

    stop = False
    null = False
    perturbed = False
    t_eff = 0.0

    if (g_norm <= p.nu_opt and eps_k <= p.epsilon_opt) or (
        g_norm == 0.0 and p.epsilon_opt == 0.0
    ):
        # Stopping rule (the exact-zero clause covers runs whose epsilon
        # target is unreachable): state untouched, terminal record below
        stop = True
        state.warm_ok = True
    elif g_norm <= nu_k:
        # Reduction branch: shrink both radii together, keep the iterate
        state.nu *= p.theta_nu
        state.epsilon *= p.theta_eps
        state.warm_ok = True
    else:
        # Descent branch: backtracking along the variant direction
        use_g = g
        if v.nondiff_strategy == "perturb_direction" and grad_x is not None:
            use_g, perturbed = _perturb_direction(g, grad_x, state.sampler)
        if v.direction_mode == "trust_region":
            scale: Optional[float] = eps_k / g_norm
        elif v.scaling_mode == "bb":
            alpha = min(max(state.alpha, v.alpha_min), v.alpha_max)
            scale = 1.0 / alpha
        elif v.scaling_mode == "matrix":
            scale = None  # step not collinear with g; t_k stays the raw t
        else:
            scale = 1.0
        d = compute_direction(use_g, eps_k, _current_scaling(state, v), v)
        s = -d
        coeff = g_norm * g_norm * scale if scale is not None else float(g @ s)
        delta_k = delta_sequence(state.k, state.delta0) if v.line_search_mode == "nonmonotone" else 0.0
        budget = v.max_ls_evals if v.line_search_mode == "limited" else None
        out = armijo_backtrack(
            oracle.value, x, f_x, s, p.beta, p.gamma, coeff, delta_k, budget, p.t_min
        )
        if out.null_step:
            null = True
            state.warm_ok = True
        elif not out.accepted:
            stop = True  # monotone backtracking fell below t_min
        else:
            t_eff = out.t * scale if scale is not None else out.t
            tentative = x - out.t * s
            ev = oracle.full(tentative)
            if ev.differentiable or drop_center:
                x_next, ev_next = tentative, ev
            else:
                x_next, ev_next = handle_nondifferentiable(
                    tentative, x, t_eff, g, eps_k, f_x, oracle, state.sampler, p, delta_k
                )
                perturbed = True
            if v.scaling_mode == "bb":
                if grad_x is not None and ev_next.gradient is not None:
                    state.alpha = bb_alpha(
                        x_next - x, ev_next.gradient - grad_x, v.alpha_min, v.alpha_max
                    )
                else:
                    state.alpha = 1.0
            state.x = x_next
            state.eval = ev_next
            state.warm_ok = False

    if v.sampling_mode == "adaptive":
        state.sample_count = adaptive_sample_count(state.sample_count, null, v.m_min, v.m_max)

    rec = IterationRecord(
        k=state.k,
        x=np.array(x, copy=True),
        f_x=f_x,
        grad_x=None if grad_x is None else np.array(grad_x, copy=True),
        epsilon_k=float(eps_k),
        nu_k=float(nu_k),
        g_k=np.array(g, copy=True),
        g_norm=g_norm,
        t_k=float(t_eff),
        n_fevals=oracle.n_fevals - fev0,
        n_gevals=oracle.n_gevals - gev0,
        perturbed=perturbed,
        null_step=null,
    )
    if observer is not None:
        observer(StepEvent(k=state.k, bundle=bundle, solution=sol, record=rec, points=col_points))
    state.k += 1
    return rec, stop


def _current_scaling(state: SolverState, v) -> Optional[object]:
    if v.scaling_mode == "bb":
        return state.alpha
    if v.scaling_mode == "matrix":
        return state.H
    return None


def _repair_start(oracle: CountingOracle, x0: np.ndarray, sampler: BallSampler):
    """First evaluation; if the oracle flags x0 itself, nudge within a tiny
    ball until it lands on a differentiable point."""
    ev = oracle.full(x0)
    if ev.differentiable:
        return x0, ev
    bound = 1e-8 * (1.0 + float(np.linalg.norm(x0)))
    for _ in range(X0_PERTURB_ATTEMPTS):
        cand = perturb_within(x0, bound, sampler)
        ev = oracle.full(cand)
        if ev.differentiable:
            return cand, ev
    raise GsError("no differentiable point found near the start point")


def _unbounded_record(state: SolverState, last: IterationRecord, p: GsParams) -> IterationRecord:
    # synthetic terminal record at the new iterate; grad_x omitted because
    # g_k is carried over from the step that got here
    return IterationRecord(
        k=state.k,
        x=np.array(state.x, copy=True),
        f_x=state.eval.value,
        grad_x=None,
        epsilon_k=state.epsilon,
        nu_k=state.nu,
        g_k=np.array(last.g_k, copy=True),
        g_norm=last.g_norm,
        t_k=0.0,
        n_fevals=0,
        n_gevals=0,
        perturbed=False,
        null_step=False,
    )


def solve(oracle_fn, x0, params: Optional[GsParams] = None, observer=None,
          force_center_only_bundle: bool = False) -> SolveReport:
    """Run the sampling solver from x0 until a stopping rule fires.

    oracle_fn maps a point to an OracleEval; params defaults to
    default_params(x0). observer, when given, is called once per iteration
    with a StepEvent. force_center_only_bundle makes iteration 0 use the
    bundle {grad f(x0)} alone (steepest-descent first step) for contrast
    demonstrations.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    p = params if params is not None else default_params(x0)
    validate_params(p, x0.size)
    v = p.variant
    oracle = CountingOracle(oracle_fn)
    sampler = BallSampler(p.seed)
    drop_center = v.nondiff_strategy == "drop_center_gradient"

    if drop_center:
        ev0 = oracle.full(x0)
    else:
        x0, ev0 = _repair_start(oracle, x0, sampler)

    if v.line_search_mode == "nonmonotone" and v.delta0 is None:
        delta0 = 1e-4 * (1.0 + abs(ev0.value)) if drop_center else 0.0
    else:
        delta0 = v.delta0 if v.delta0 is not None else 0.0

    H = None
    if v.scaling_mode == "matrix":
        base = np.eye(x0.size) if v.matrix is None else np.asarray(v.matrix, dtype=float)
        H = safeguard_matrix(base, v.lambda_min, v.lambda_max)

    state = SolverState(
        k=0,
        x=x0,
        eval=ev0,
        epsilon=p.epsilon0,
        nu=p.nu0,
        sampler=sampler,
        alpha=1.0,
        H=H,
        sample_count=v.m_min if v.sampling_mode == "adaptive" else p.sample_size,
        delta0=delta0,
    )

    trace: list = []
    while state.k < p.max_iter:
        try:
            rec, stop = gs_step(state, p, oracle, observer, force_center_only_bundle)
        except GsError as err:
            # surface the failure but keep the completed records reachable
            err.partial_trace = tuple(trace)
            raise
        trace.append(rec)
        if stop:
            break
        if state.eval.value <= p.f_floor:
            trace.append(_unbounded_record(state, rec, p))
            break

    final = trace[-1]
    return SolveReport(
        status=classify_termination(final, p),
        x_final=np.array(state.x, copy=True),
        f_final=state.eval.value,
        certificate=(final.g_norm, final.epsilon_k),
        trace=tuple(trace),
    )


def steepest_descent(oracle_fn, x0, beta: float = 1e-4, gamma: float = 0.5,
                     max_iter: int = 10000, t_min: float = 1e-16,
                     f_floor: float = -1e12, seed: int = 0) -> SolveReport:
    """Plain Armijo steepest descent on the same oracle protocol, as the
    no-sampling contrast: the bundle is {grad f(x_k)} alone, nothing is
    sampled, and the run records use epsilon_k = nu_k = 0."""
    x0 = np.asarray(x0, dtype=float).ravel()
    p = default_params(x0, beta=beta, gamma=gamma, max_iter=max_iter,
                       t_min=t_min, f_floor=f_floor, seed=seed)
    oracle = CountingOracle(oracle_fn)
    sampler = BallSampler(seed)
    x, ev = _repair_start(oracle, x0, sampler)

    trace: list = []
    stopped = False
    for k in range(max_iter):
        fev0, gev0 = oracle.n_fevals, oracle.n_gevals
        g = np.asarray(ev.gradient, dtype=float)
        g_norm = float(np.linalg.norm(g))
        t_eff = 0.0
        null = False
        perturbed = False
        stop = False
        if g_norm == 0.0:
            stop = True
        else:
            out = armijo_backtrack(
                oracle.value, x, ev.value, g, beta, gamma, g_norm * g_norm, 0.0, None, t_min
            )
            if not out.accepted:
                stop = True
            else:
                t_eff = out.t
                tentative = x - out.t * g
                ev_t = oracle.full(tentative)
                if ev_t.differentiable:
                    x_next, ev_next = tentative, ev_t
                else:
                    try:
                        x_next, ev_next = handle_nondifferentiable(
                            tentative, x, out.t, g, math.inf, ev.value, oracle, sampler, p
                        )
                        perturbed = True
                    except GsError:
                        # no differentiable continuation: the descent method
                        # is stalled at this kink
                        t_eff = 0.0
                        stop = True
        rec = IterationRecord(
            k=k,
            x=np.array(x, copy=True),
            f_x=ev.value,
            grad_x=np.array(g, copy=True),
            epsilon_k=0.0,
            nu_k=0.0,
            g_k=np.array(g, copy=True),
            g_norm=g_norm,
            t_k=t_eff,
            n_fevals=oracle.n_fevals - fev0,
            n_gevals=oracle.n_gevals - gev0,
            perturbed=perturbed,
            null_step=null,
        )
        trace.append(rec)
        if stop:
            stopped = True
            break
        x, ev = x_next, ev_next
        if ev.value <= f_floor:
            trace.append(IterationRecord(
                k=k + 1, x=np.array(x, copy=True), f_x=ev.value, grad_x=None,
                epsilon_k=0.0, nu_k=0.0, g_k=np.array(g, copy=True), g_norm=g_norm,
                t_k=0.0, n_fevals=0, n_gevals=0, perturbed=False, null_step=False,
            ))
            stopped = True
            break

    final = trace[-1]
    if not stopped:
        status = Status.MAX_ITERATIONS
    elif final.f_x <= f_floor:
        status = Status.UNBOUNDED
    elif final.g_norm == 0.0:
        status = Status.GRADIENT_ZERO
    else:
        status = Status.LINE_SEARCH_FAILURE
    return SolveReport(
        status=status,
        x_final=np.array(x, copy=True),
        f_final=ev.value,
        certificate=(final.g_norm, final.epsilon_k),
        trace=tuple(trace),
    )


# named variant bundles: base algorithm plus the documented enhancements
VARIANT_PRESETS: dict = {
    "fixed": dict(),
    "nonnorm": dict(direction_mode="nonnormalized"),
    "trust": dict(direction_mode="trust_region"),
    "nonmonotone": dict(line_search_mode="nonmonotone"),
    "limited": dict(line_search_mode="limited", max_ls_evals=50),
    "adaptive": dict(
        sampling_mode="adaptive", m_min=2, m_max=32, reuse_gradients=True,
        line_search_mode="limited", max_ls_evals=50,
    ),
    "bb": dict(scaling_mode="bb"),
    "drop_center": dict(
        nondiff_strategy="drop_center_gradient", line_search_mode="nonmonotone"
    ),
    "perturb_dir": dict(nondiff_strategy="perturb_direction"),
}

_PRESET_ALIASES = {
    "nonnormalized": "nonnorm",
    "trust_region": "trust",
    "drop_center_gradient": "drop_center",
    "perturb_direction": "perturb_dir",
}


def preset_variant(name: str) -> VariantConfig:
    """VariantConfig for a named preset; unknown names raise."""
    key = _PRESET_ALIASES.get(name, name)
    if key not in VARIANT_PRESETS:
        known = ", ".join(sorted(VARIANT_PRESETS))
        raise ValueError(f"unknown variant preset {name!r}; known: {known}")
    return VariantConfig(**VARIANT_PRESETS[key])


def variant_names(include_aliases: bool = False) -> list[str]:
    """The accepted preset names (canonical keys, plus long-form aliases
    when asked)."""
    names = sorted(VARIANT_PRESETS)
    if include_aliases:
        names += sorted(_PRESET_ALIASES)
    return names
