"""Minimum-norm element of the convex hull of a gradient bundle.

Solves min ||G lambda||^2 / 2 over the unit simplex (the dual of the
search-direction QP: d = -G lambda at the optimum) with Wolfe's
minimum-norm-point algorithm: grow a corral of columns, move to the
affine minimizer over the corral, drop columns whose weight hits zero.
Supports warm starts from a previous simplex vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

# Weights at or below this are treated as "on the simplex boundary" inside
# the minor cycle; final weights are clipped and renormalized exactly.
_WEIGHT_FLOOR = 1e-14


@dataclass(frozen=True)
class GradientBundle:
    """Columns of G_k (center gradient first, then samples, then cached
    entries) with provenance tags saying where each column came from."""

    matrix: np.ndarray  # shape (n, p)
    tags: tuple[str, ...]

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[1] < 1:
            raise ValueError("bundle needs at least one column")
        if not np.all(np.isfinite(M)):
            raise ValueError("bundle columns must be finite")
        if len(self.tags) != M.shape[1]:
            raise ValueError("one tag per column required")
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_columns(cls, columns: Sequence, tags: Sequence[str] | None = None) -> "GradientBundle":
        cols = [np.asarray(c, dtype=float) for c in columns]
        if not cols:
            raise ValueError("bundle needs at least one column")
        M = np.stack(cols, axis=1)
        if tags is None:
            tags = tuple(f"col:{i}" for i in range(M.shape[1]))
        return cls(M, tuple(tags))

    @property
    def n_columns(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class MinNormSolution:
    g: np.ndarray
    lam: np.ndarray
    residual: float  # max_v (||g||^2 - v'g), clamped at 0
    iterations: int


def qp_tolerance(G: GradientBundle) -> float:
    """Default certificate tolerance, scaled for invariance under column
    rescaling: 1e-10 * (1 + max column norm)^2."""
    max_norm = float(np.max(np.linalg.norm(G.matrix, axis=0)))
    return 1e-10 * (1.0 + max_norm) ** 2


def _affine_minimizer(C: np.ndarray) -> np.ndarray:
    """Weights alpha minimizing ||C alpha|| subject to sum(alpha) = 1
    (alpha unrestricted in sign), via the bordered Gram system."""
    s = C.shape[1]
    A = np.zeros((s + 1, s + 1))
    A[0, 1:] = 1.0
    A[1:, 0] = 1.0
    A[1:, 1:] = C.T @ C
    b = np.zeros(s + 1)
    b[0] = 1.0
    try:
        sol = np.linalg.solve(A, b)
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        # duplicate columns make the Gram singular; any solution will do
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return sol[1:]


def min_norm_point(
    G: GradientBundle,
    tol: float | None = None,
    warm: Optional[Sequence[float]] = None,
) -> MinNormSolution:
    """Projection of the origin onto conv(columns of G).

    Certified on return by the variational inequality v'g >= ||g||^2 - tol
    for every column v. Ties in the entering-column choice break toward the
    lowest column index (np.argmin), so runs are deterministic. A feasible
    warm start only changes the path, not the answer (within tol).
    """
    if tol is None:
        tol = qp_tolerance(G)
    if not tol > 0:
        raise ValueError("tol must be positive")
    M = G.matrix
    p = M.shape[1]

    if warm is not None:
        w = np.asarray(warm, dtype=float)
        if w.shape != (p,):
            raise ValueError("warm start length must equal the column count")
        support = [i for i in range(p) if w[i] > _WEIGHT_FLOOR]
        if not support:
            support = [int(np.argmin(np.einsum("ij,ij->j", M, M)))]
            lam_s = np.ones(1)
        else:
            lam_s = w[support]
            lam_s = lam_s / lam_s.sum()
    else:
        support = [int(np.argmin(np.einsum("ij,ij->j", M, M)))]
        lam_s = np.ones(1)

    max_major = 100 * p
    iterations = 0
    while True:
        iterations += 1
        # minor cycle: move to the affine minimizer over the current
        # support, dropping columns whose weight hits the boundary (runs
        # first so a warm-started support gets re-optimized before the
        # entering test)
        while len(support) > 1:
            alpha = _affine_minimizer(M[:, support])
            if np.all(alpha > _WEIGHT_FLOOR):
                lam_s = alpha
                break
            mask = alpha <= _WEIGHT_FLOOR
            den = lam_s[mask] - alpha[mask]
            ratios = np.where(den > 0, lam_s[mask] / np.where(den > 0, den, 1.0), 0.0)
            theta = float(min(1.0, ratios.min()))
            lam_s = lam_s + theta * (alpha - lam_s)
            lam_s[mask] = np.where(ratios <= theta + 1e-15, 0.0, lam_s[mask])
            keep = lam_s > 0.0
            if keep.all():
                # floating point left nothing at exactly zero: force the
                # smallest masked weight out so the minor cycle contracts
                drop = np.flatnonzero(mask)[int(np.argmin(lam_s[mask]))]
                keep[drop] = False
            if not keep.any():
                keep[int(np.argmax(alpha))] = True
            support = [s for s, k in zip(support, keep) if k]
            lam_s = lam_s[keep]
            if len(support) == 1:
                lam_s = np.ones(1)

        x = M[:, support] @ lam_s
        xx = float(x @ x)
        scores = M.T @ x
        j = int(np.argmin(scores))
        if scores[j] >= xx - tol or iterations > max_major or j in support:
            # certified, out of budget, or numerically stuck: report as-is,
            # the residual tells the caller how good the certificate is
            break
        support.append(j)
        lam_s = np.append(lam_s, 0.0)

    lam_s = np.clip(lam_s, 0.0, None)
    total = lam_s.sum()
    lam_s = lam_s / total if total > 0 else np.full(len(support), 1.0 / len(support))
    lam = np.zeros(p)
    lam[support] = lam_s
    g = M @ lam
    residual = max(0.0, float(g @ g) - float(np.min(M.T @ g)))
    return MinNormSolution(g=g, lam=lam, residual=residual, iterations=iterations)


def warm_start_augment(lam: Sequence[float], p: int) -> np.ndarray:
    """lambda with p zeros appended: feasible for the augmented bundle and
    achieving the same objective value (the new columns carry no weight)."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    lam = np.asarray(lam, dtype=float)
    return np.concatenate([lam, np.zeros(p)])


def check_optimality(G: GradientBundle, g, tol: float) -> tuple[bool, int]:
    """Projection certificate: true iff min_v (v'g - ||g||^2) >= -tol.
    Also reports the worst (most violating) column index."""
    g = np.asarray(g, dtype=float)
    slack = G.matrix.T @ g - float(g @ g)
    worst = int(np.argmin(slack))
    return bool(slack[worst] >= -tol), worst
