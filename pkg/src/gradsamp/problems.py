"""Built-in objective oracles with exact gradients and tie-based
differentiability detection.

Most of the corpus is finite-max: f(x) = max_i p_i(x) over smooth pieces
p_i(x) = 0.5 x'Q_i x + b_i'x + c_i, nondifferentiable exactly where two
or more pieces tie for the max. A relative tie band tau catches the
floating-point coincidences that matter in practice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import OracleEval

# Tie tolerance: pieces within tau_rel * (largest term magnitude across
# pieces) of the max count as tied. The scale must track the pieces' own
# float evaluation error, not an absolute floor: near a minimum with
# |f| << 1 an absolute band is orders wider than the true rounding noise
# and falsely flags whole neighborhoods as nondifferentiable.
TAU_REL = 1e-12


@dataclass(frozen=True)
class Piece:
    """Smooth component q(x) = 0.5 x'Qx + b'x + c with grad Qx + b;
    Q = None means the purely linear piece b'x + c."""

    b: np.ndarray
    c: float = 0.0
    Q: Optional[np.ndarray] = None

    def value(self, x: np.ndarray) -> float:
        v = float(self.b @ x) + self.c
        if self.Q is not None:
            v += 0.5 * float(x @ (self.Q @ x))
        return v

    def grad(self, x: np.ndarray) -> np.ndarray:
        g = self.b.copy()
        if self.Q is not None:
            g = g + self.Q @ x
        return g

    def magnitude(self, x: np.ndarray) -> float:
        """Sum of absolute term magnitudes entering value(x): the scale of
        its floating-point evaluation error."""
        ax = np.abs(x)
        m = float(np.abs(self.b) @ ax) + abs(self.c)
        if self.Q is not None:
            m += 0.5 * float(ax @ (np.abs(self.Q) @ ax))
        return m


def piece(b, c=0.0, Q=None) -> Piece:
    b = np.asarray(b, dtype=float)
    if Q is not None:
        Q = np.asarray(Q, dtype=float)
    return Piece(b=b, c=float(c), Q=Q)


@dataclass(frozen=True)
class FiniteMaxSpec:
    pieces: tuple[Piece, ...]
    tau_rel: float = TAU_REL


def eval_finite_max(spec: FiniteMaxSpec, x) -> OracleEval:
    """max over pieces; differentiable (with that piece's gradient) iff the
    argmax is unique beyond the tie band."""
    x = np.asarray(x, dtype=float)
    vals = [p.value(x) for p in spec.pieces]
    vmax = max(vals)
    tau = spec.tau_rel * max(p.magnitude(x) for p in spec.pieces)
    active = [i for i, v in enumerate(vals) if v >= vmax - tau]
    if len(active) == 1:
        return OracleEval(vmax, spec.pieces[active[0]].grad(x), True)
    return OracleEval(vmax, None, False)


@dataclass(frozen=True)
class Problem:
    """A named oracle with optional reference values. The Lipschitz bound,
    when present, holds on the box ||x||_inf <= 20."""

    name: str
    dim: int
    oracle: Callable[[np.ndarray], OracleEval]
    f_star: Optional[float] = None
    x_star: Optional[np.ndarray] = None
    lipschitz_bound: Optional[float] = None
    default_x0: Optional[np.ndarray] = None
    experimental: bool = False
    spec: Optional[FiniteMaxSpec] = None


def _finite_max_problem(name, spec, dim, **kw) -> Problem:
    return Problem(name=name, dim=dim, oracle=lambda x: eval_finite_max(spec, x), spec=spec, **kw)


def make_helou2d() -> Problem:
    """f(w,z) = max{0.5 w^2 + 0.1 z, w + 0.1 z + 1, -w + 0.1 z + 1,
    -0.05 z - 50}: smooth in the unit ball at (10,10) but with a
    nondifferentiable line w = 0 that a unit Armijo step from there lands
    on exactly. Minimum -33 at (0, -340), where pieces 2-4 tie."""
    spec = FiniteMaxSpec(
        pieces=(
            piece(b=[0.0, 0.1], Q=[[1.0, 0.0], [0.0, 0.0]]),
            piece(b=[1.0, 0.1], c=1.0),
            piece(b=[-1.0, 0.1], c=1.0),
            piece(b=[0.0, -0.05], c=-50.0),
        )
    )
    return _finite_max_problem(
        "helou2d", spec, dim=2,
        f_star=-33.0, x_star=np.array([0.0, -340.0]),
        lipschitz_bound=20.1, default_x0=np.array([10.0, 10.0]),
    )


def make_l1(n: int = 10) -> Problem:
    """f(x) = ||x||_1; the sign-vector gradient field flips on every axis
    hyperplane, so hulls of nearby gradients collapse to 0 there."""

    def oracle(x):
        x = np.asarray(x, dtype=float)
        v = float(np.abs(x).sum())
        # sign(x_i) is exact in floats for any x_i != 0, so only exact
        # zeros are genuine kinks; a relative band here would swallow
        # iterates that are honestly differentiable.
        if np.any(x == 0.0):
            return OracleEval(v, None, False)
        return OracleEval(v, np.sign(x), True)

    return Problem(
        name="l1", dim=n, oracle=oracle,
        f_star=0.0, x_star=np.zeros(n), lipschitz_bound=float(np.sqrt(n)),
    )


def make_maxq(n: int = 10) -> Problem:
    """f(x) = max_i x_i^2; nondifferentiable where the largest squared
    coordinates tie, including the minimizer x = 0."""
    pieces = []
    for i in range(n):
        Q = np.zeros((n, n))
        Q[i, i] = 2.0
        pieces.append(piece(b=np.zeros(n), Q=Q))
    spec = FiniteMaxSpec(pieces=tuple(pieces))
    return _finite_max_problem(
        "maxq", spec, dim=n,
        f_star=0.0, x_star=np.zeros(n), lipschitz_bound=40.0,
    )


def make_smooth_quad(n: int = 2) -> Problem:
    """f(x) = 0.5 ||x||^2: the smooth sanity case where sampling degenerates
    to approximate steepest descent."""
    spec = FiniteMaxSpec(pieces=(piece(b=np.zeros(n), Q=np.eye(n)),))
    return _finite_max_problem(
        "smooth_quad", spec, dim=n,
        f_star=0.0, x_star=np.zeros(n), lipschitz_bound=float(20.0 * np.sqrt(n)),
        default_x0=np.array([3.0, 4.0]) if n == 2 else None,
    )


def make_dirlip1d() -> Problem:
    """f(x) = sqrt(max(0,x)) + 0.05 x^2: directionally Lipschitz but not
    Lipschitz at 0 (one-sided infinite slope). Experimental: no convergence
    claims, included as a boundary-of-theory demo."""

    def oracle(x):
        x = np.asarray(x, dtype=float)
        s = float(x[0])
        v = float(np.sqrt(max(0.0, s)) + 0.05 * s * s)
        # one-sided infinite slope lives only at s = 0 itself
        if s == 0.0:
            return OracleEval(v, None, False)
        if s > 0:
            return OracleEval(v, np.array([0.5 / np.sqrt(s) + 0.1 * s]), True)
        return OracleEval(v, np.array([0.1 * s]), True)

    return Problem(
        name="dirlip1d", dim=1, oracle=oracle,
        f_star=0.0, x_star=np.zeros(1),
        default_x0=np.array([4.0]), experimental=True,
    )


def make_sd_stall() -> Problem:
    """f(u,v) = max{-u + 25v, -u - 25v, u - 1}, minimized at (0.5, 0) with
    value -0.5. From (0, 0.1), plain steepest descent zigzags across the
    ridge v = 0 with geometrically shrinking steps and stalls far from the
    minimizer, while a sampled bundle straddling the ridge yields the
    direction (1, 0) and walks straight in."""
    spec = FiniteMaxSpec(
        pieces=(
            piece(b=[-1.0, 25.0]),
            piece(b=[-1.0, -25.0]),
            piece(b=[1.0, 0.0], c=-1.0),
        )
    )
    return _finite_max_problem(
        "sd_stall", spec, dim=2,
        f_star=-0.5, x_star=np.array([0.5, 0.0]),
        lipschitz_bound=float(np.sqrt(626.0)), default_x0=np.array([0.0, 0.1]),
    )


_FACTORIES = {
    "helou2d": (make_helou2d, False),
    "l1": (make_l1, True),
    "maxq": (make_maxq, True),
    "smooth_quad": (make_smooth_quad, True),
    "dirlip1d": (make_dirlip1d, False),
    "sd_stall": (make_sd_stall, False),
}


def problem_names() -> list[str]:
    return list(_FACTORIES)


def problem_accepts_dim(name: str) -> bool:
    """True for the dimension-parametric families (l1, maxq, smooth_quad)."""
    if name not in _FACTORIES:
        raise ValueError(f"unknown problem {name!r}; known: {', '.join(_FACTORIES)}")
    return _FACTORIES[name][1]


def make_problem(name: str, dim: Optional[int] = None) -> Problem:
    """Problem by registry name; dim applies to the dimension-parametric
    families and is rejected elsewhere."""
    if name not in _FACTORIES:
        raise ValueError(f"unknown problem {name!r}; known: {', '.join(_FACTORIES)}")
    factory, takes_dim = _FACTORIES[name]
    if dim is None:
        return factory()
    if not takes_dim:
        fixed = factory()
        if dim != fixed.dim:
            raise ValueError(f"problem {name!r} has fixed dimension {fixed.dim}")
        return fixed
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return factory(dim)


def corpus() -> list[Problem]:
    """The built-in problems at their default dimensions."""
    return [make_problem(name) for name in _FACTORIES]


def problem_from_pieces(name: str, dim: int, pieces_data: list[dict]) -> Problem:
    """Custom finite-max problem from declarative piece coefficients:
    each entry {"b": [...], "c": float, "Q": [[...]] or absent}."""
    pieces = []
    for d in pieces_data:
        b = d.get("b")
        if b is None:
            b = np.zeros(dim)
        p = piece(b=b, c=d.get("c", 0.0), Q=d.get("Q"))
        if p.b.shape != (dim,):
            raise ValueError(f"piece b must have length {dim}")
        if p.Q is not None and p.Q.shape != (dim, dim):
            raise ValueError(f"piece Q must be {dim}x{dim}")
        pieces.append(p)
    if not pieces:
        raise ValueError("a finite-max problem needs at least one piece")
    spec = FiniteMaxSpec(pieces=tuple(pieces))
    return _finite_max_problem(name, spec, dim=dim)


def load_problem_file(path: str) -> Problem:
    """Load a custom problem from a JSON file:
    {"name": ..., "dim": n, "pieces": [{"b": [...], "c": ..., "Q": [[...]]}]}."""
    with open(path) as fh:
        data = json.load(fh)
    for key in ("dim", "pieces"):
        if key not in data:
            raise ValueError(f"problem file missing {key!r}")
    return problem_from_pieces(data.get("name", "custom"), int(data["dim"]), data["pieces"])
