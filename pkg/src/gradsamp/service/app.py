"""HTTP front end for the solver.

Endpoints: GET /health, GET /problems, POST /solve, POST /compare.
Error mapping, mirrored by the CLI's exit codes: unknown problem or
variant name -> 404 with the known-name list, invalid parameters or
malformed problem definitions -> 400 with the violation report,
a solver hard failure -> 500 carrying the partial trace.
"""
import statistics
from dataclasses import replace

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..core import (
    GsError,
    InvalidParams,
    VariantConfig,
    default_params,
    record_to_dict,
    report_to_dict,
)
from ..problems import (
    Problem,
    make_problem,
    problem_accepts_dim,
    problem_from_pieces,
    problem_names,
)
from ..solver import preset_variant, solve, variant_names
from .models import (
    CompareRequest,
    ProblemInfo,
    SolveRequest,
)


class _RequestError(Exception):
    """Maps straight to a JSON error response."""

    def __init__(self, status_code: int, body: dict):
        self.status_code = status_code
        self.body = body


def _error(status_code: int, detail: str, **extra) -> _RequestError:
    return _RequestError(status_code, {"detail": detail, **extra})


def default_start(problem: Problem, seed: int) -> np.ndarray:
    """Start point used when a request omits x0: the problem's default
    when it has one, else uniform in [-1,1]^n from a stream seeded by the
    run seed (kept independent of the solver's sampling stream)."""
    if problem.default_x0 is not None:
        return np.asarray(problem.default_x0, dtype=float)
    rng = np.random.default_rng([seed, 0])
    return rng.uniform(-1.0, 1.0, problem.dim)


def _resolve_problem(req) -> Problem:
    if (req.problem is None) == (req.custom is None):
        raise _error(400, "exactly one of 'problem' and 'custom' must be given")
    try:
        if req.custom is not None:
            pieces = [p.model_dump(exclude_none=True) for p in req.custom.pieces]
            return problem_from_pieces(req.custom.name, req.custom.dim, pieces)
        if req.problem not in problem_names():
            raise _error(
                404,
                f"unknown problem {req.problem!r}",
                known=problem_names(),
            )
        return make_problem(req.problem, req.dim)
    except ValueError as err:
        raise _error(400, str(err))


def _resolve_variant(name, overrides) -> VariantConfig:
    if name is not None:
        if name not in variant_names(include_aliases=True):
            raise _error(
                404,
                f"unknown variant {name!r}",
                known=variant_names(),
            )
        v = preset_variant(name)
    else:
        v = VariantConfig()
    if overrides is not None:
        fields = overrides.model_dump(exclude_none=True)
        if "matrix" in fields:
            fields["matrix"] = np.asarray(fields["matrix"], dtype=float)
        v = replace(v, **fields)
    return v


def _build_params(x0, seed, params_body, variant: VariantConfig):
    over = params_body.model_dump(exclude_none=True) if params_body else {}
    return default_params(x0, seed=seed, variant=variant, **over)


def _run_one(problem: Problem, x0, params, force_center_only=False):
    try:
        return solve(
            problem.oracle, x0, params,
            force_center_only_bundle=force_center_only,
        )
    except InvalidParams as err:
        raise _error(400, "invalid parameters", violations=err.errors)
    except GsError as err:
        partial = getattr(err, "partial_trace", ())
        raise _error(
            500,
            str(err),
            partial_trace=[record_to_dict(r) for r in partial],
        )


app = FastAPI(title="gradsamp service", version=__version__)


@app.exception_handler(_RequestError)
async def _request_error_handler(request, exc: _RequestError):
    return JSONResponse(status_code=exc.status_code, content=exc.body)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/problems")
def list_problems() -> list[ProblemInfo]:
    rows = []
    for name in problem_names():
        prob = make_problem(name)
        rows.append(
            ProblemInfo(
                name=name,
                dim=prob.dim,
                parametric_dim=problem_accepts_dim(name),
                f_star=prob.f_star,
                lipschitz_bound=prob.lipschitz_bound,
                experimental=prob.experimental,
                has_default_x0=prob.default_x0 is not None,
            )
        )
    return rows


@app.post("/solve")
def solve_endpoint(req: SolveRequest):
    problem = _resolve_problem(req)
    if req.x0 is not None:
        x0 = np.asarray(req.x0, dtype=float)
        if x0.shape != (problem.dim,):
            raise _error(
                400, f"x0 must have length {problem.dim}, got {x0.size}"
            )
    else:
        x0 = default_start(problem, req.seed)
    variant = _resolve_variant(req.variant, req.variant_config)
    try:
        params = _build_params(x0, req.seed, req.params, variant)
    except InvalidParams as err:
        raise _error(400, "invalid parameters", violations=err.errors)
    report = _run_one(
        problem, x0, params, force_center_only=req.force_center_only_bundle
    )
    return report_to_dict(report, include_trace=req.include_trace)


@app.post("/compare")
def compare_endpoint(req: CompareRequest):
    if len(req.variants) < 2:
        raise _error(400, "compare needs at least 2 variants")
    if not req.seeds:
        raise _error(400, "compare needs at least 1 seed")
    problem = _resolve_problem(req)
    variants = {
        name: _resolve_variant(name, None) for name in req.variants
    }
    rows = []
    for name, variant in variants.items():
        for seed in req.seeds:
            if req.x0 is not None:
                x0 = np.asarray(req.x0, dtype=float)
                if x0.shape != (problem.dim,):
                    raise _error(
                        400,
                        f"x0 must have length {problem.dim}, got {x0.size}",
                    )
            else:
                x0 = default_start(problem, seed)
            over = req.params
            try:
                params = _build_params(x0, seed, over, variant)
                if req.budget is not None:
                    params = replace(params, max_iter=req.budget)
            except InvalidParams as err:
                raise _error(
                    400, "invalid parameters", violations=err.errors
                )
            report = _run_one(problem, x0, params)
            rows.append(
                dict(
                    variant=name,
                    seed=seed,
                    status=report.status.value,
                    f_final=float(report.f_final),
                    iterations=report.iterations,
                    n_gevals=report.n_gevals,
                    n_fevals=report.n_fevals,
                )
            )
    medians = []
    for name in variants:
        sub = [r for r in rows if r["variant"] == name]
        statuses = sorted({r["status"] for r in sub})
        medians.append(
            dict(
                variant=name,
                status=statuses[0] if len(statuses) == 1 else ",".join(statuses),
                f_final=float(statistics.median(r["f_final"] for r in sub)),
                iterations=float(statistics.median(r["iterations"] for r in sub)),
                n_gevals=float(statistics.median(r["n_gevals"] for r in sub)),
                n_fevals=float(statistics.median(r["n_fevals"] for r in sub)),
            )
        )
    return {"rows": rows, "medians": medians}
