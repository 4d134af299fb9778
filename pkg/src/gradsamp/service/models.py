"""Request and response bodies for the solver service.

Every numeric field that overrides a solver default is Optional: absent
means "use the default computed for this run", so requests stay minimal
and the server remains the single source of defaults.
"""
from typing import Optional

from pydantic import BaseModel


class PieceBody(BaseModel):
    """One smooth component 0.5 x'Qx + b'x + c of a custom finite-max
    problem; b defaults to zeros, Q absent means a linear piece."""

    b: Optional[list[float]] = None
    c: float = 0.0
    Q: Optional[list[list[float]]] = None


class CustomProblemBody(BaseModel):
    name: str = "custom"
    dim: int
    pieces: list[PieceBody]


class VariantBody(BaseModel):
    """Field-level overrides of the solver's variant switches."""

    direction_mode: Optional[str] = None
    line_search_mode: Optional[str] = None
    delta0: Optional[float] = None
    max_ls_evals: Optional[int] = None
    sampling_mode: Optional[str] = None
    m_min: Optional[int] = None
    m_max: Optional[int] = None
    reuse_gradients: Optional[bool] = None
    scaling_mode: Optional[str] = None
    alpha_min: Optional[float] = None
    alpha_max: Optional[float] = None
    lambda_min: Optional[float] = None
    lambda_max: Optional[float] = None
    matrix: Optional[list[list[float]]] = None
    nondiff_strategy: Optional[str] = None


class ParamsBody(BaseModel):
    """Scalar solver parameter overrides (names match GsParams fields)."""

    epsilon0: Optional[float] = None
    nu0: Optional[float] = None
    sample_size: Optional[int] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None
    epsilon_opt: Optional[float] = None
    nu_opt: Optional[float] = None
    theta_eps: Optional[float] = None
    theta_nu: Optional[float] = None
    max_iter: Optional[int] = None
    t_min: Optional[float] = None
    f_floor: Optional[float] = None


class SolveRequest(BaseModel):
    """One solver run. Exactly one of problem/custom must be given; x0
    absent means the problem's default start (seeded random for the
    dimension-parametric families)."""

    problem: Optional[str] = None
    custom: Optional[CustomProblemBody] = None
    dim: Optional[int] = None
    x0: Optional[list[float]] = None
    seed: int = 0
    params: Optional[ParamsBody] = None
    variant: Optional[str] = None
    variant_config: Optional[VariantBody] = None
    include_trace: bool = True
    force_center_only_bundle: bool = False


class SolveResponse(BaseModel):
    status: str
    x_final: list[float]
    f_final: float
    certificate: dict
    iterations: int
    n_fevals: int
    n_gevals: int
    trace: Optional[list[dict]] = None


class CompareRequest(BaseModel):
    """A benchmark sweep: every variant in `variants` (preset names) runs
    once per seed on the same problem and start-point rule."""

    problem: Optional[str] = None
    custom: Optional[CustomProblemBody] = None
    dim: Optional[int] = None
    x0: Optional[list[float]] = None
    variants: list[str]
    seeds: list[int]
    budget: Optional[int] = None
    params: Optional[ParamsBody] = None


class CompareRow(BaseModel):
    variant: str
    seed: int
    status: str
    f_final: float
    iterations: int
    n_gevals: int
    n_fevals: int


class CompareMedianRow(BaseModel):
    variant: str
    status: str
    f_final: float
    iterations: float
    n_gevals: float
    n_fevals: float


class CompareResponse(BaseModel):
    rows: list[CompareRow]
    medians: list[CompareMedianRow]


class ProblemInfo(BaseModel):
    name: str
    dim: int
    parametric_dim: bool
    f_star: Optional[float] = None
    lipschitz_bound: Optional[float] = None
    experimental: bool = False
    has_default_x0: bool = False
