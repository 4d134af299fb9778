"""Independent brute-force verification oracles.

These deliberately share no code with the production min-norm solver or
the problem gradients: the QP oracle enumerates simplex weight vectors on
a uniform grid and refines locally, and the gradient oracle uses central
finite differences. Both exist so the fast paths can be checked against
something dumb and trustworthy.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import GsError

# Coarse grid denominators by column count. The enumeration cost is
# C(D+p-1, p-1), so the denominator has to shrink as columns grow; the
# local refinement passes below restore resolution afterwards.
_COARSE_DENOM = {1: 1, 2: 200, 3: 200, 4: 60, 5: 40, 6: 24}

# Refine (x10 per pass) until the effective denominator reaches this.
_TARGET_DENOM = 20000

# Half-width of the refinement box, in units of the previous grid spacing,
# by column count: a box pass costs (20*cells+1)^(p-1) evaluations, so the
# width shrinks as columns grow and the re-centering walk supplies reach.
_BOX_CELLS = {2: 1.5, 3: 1.5, 4: 1.5, 5: 1.0, 6: 0.8}


def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length `parts` summing to `total`
    (stars and bars), shape (K, parts)."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    bars = np.array(
        list(itertools.combinations(range(total + parts - 1), parts - 1)),
        dtype=np.int64,
    )
    counts = np.empty((bars.shape[0], parts), dtype=np.int64)
    counts[:, 0] = bars[:, 0]
    if parts > 2:
        counts[:, 1:-1] = np.diff(bars, axis=1) - 1
    counts[:, -1] = (total + parts - 2) - bars[:, -1]
    return counts


def _best_on_grid(M: np.ndarray, counts: np.ndarray, denom: int) -> tuple[np.ndarray, float]:
    lambdas = counts.astype(float) / denom
    pts = lambdas @ M.T  # (K, n)
    obj = np.einsum("ij,ij->i", pts, pts)
    best = int(np.argmin(obj))
    return counts[best], obj[best]


def _box_counts(center: np.ndarray, denom: int, width: int) -> np.ndarray:
    """Integer weight vectors summing to `denom` with every coordinate
    within `width` of `center` (componentwise)."""
    p = center.size
    lows = np.maximum(center - width, 0)
    highs = np.minimum(center + width, denom)
    if p == 1:
        return np.array([[denom]], dtype=np.int64)
    axes = [np.arange(lows[i], highs[i] + 1) for i in range(p - 1)]
    grids = np.meshgrid(*axes, indexing="ij")
    first = np.stack([g.ravel() for g in grids], axis=1)
    last = denom - first.sum(axis=1)
    ok = (last >= lows[-1]) & (last <= highs[-1])
    return np.concatenate([first[ok], last[ok, None]], axis=1)


def _descend_at_scale(M: np.ndarray, best: np.ndarray, obj: float,
                      denom: int, width: int) -> tuple[np.ndarray, float]:
    """Re-center the box search around the current winner until it stops
    improving. The objective is convex, so a winner whose basin lies more
    than one box away is still reached by walking box after box; each move
    strictly decreases the objective on a finite grid, so this terminates."""
    while True:
        counts = _box_counts(best, denom, width)
        cand, cand_obj = _best_on_grid(M, counts, denom)
        if not cand_obj < obj:
            return best, obj
        best, obj = cand, cand_obj


def brute_force_min_norm(columns, resolution: int | None = None) -> np.ndarray:
    """Minimum-norm point of conv(columns) by exhaustive simplex-grid search.

    Enumerates all weight vectors c/D on the simplex, picks the minimizer
    of ||G c/D||^2, then re-grids a small box around the winner at 10x
    resolution, walking the box along descent at each scale, until the
    effective denominator is large enough for ~1e-3 vector agreement.
    Column count must stay small (<= 6): the coarse enumeration is
    combinatorial.
    """
    M = _as_matrix(columns)
    p = M.shape[1]
    if p > 6:
        raise ValueError("brute_force_min_norm supports at most 6 columns")
    if p == 1:
        return M[:, 0].copy()

    denom = int(resolution) if resolution is not None else _COARSE_DENOM[p]
    counts = _compositions(denom, p)
    best, obj = _best_on_grid(M, counts, denom)

    width = int(round(_BOX_CELLS[p] * 10))
    while denom < _TARGET_DENOM:
        fine = denom * 10
        best, obj = _descend_at_scale(M, best * 10, obj, fine, width)
        denom = fine
    return M @ (best.astype(float) / denom)


def _as_matrix(columns) -> np.ndarray:
    if hasattr(columns, "matrix"):
        M = np.asarray(columns.matrix, dtype=float)
    else:
        M = np.asarray(columns, dtype=float)
        if M.ndim == 1:
            M = M[:, None]
        elif M.ndim == 2 and not isinstance(columns, np.ndarray):
            # a list of column vectors
            M = M.T
    if M.size == 0 or not np.all(np.isfinite(M)):
        raise ValueError("columns must be a nonempty finite matrix")
    return M


def fd_gradient(oracle, x, h: float | None = None) -> np.ndarray:
    """Central-difference gradient (f(x+h e_i) - f(x-h e_i)) / 2h.

    Every stencil point must be a differentiable point of the oracle;
    on a nondifferentiable stencil hit the whole stencil retries with
    h/10, at most 3 times.
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * (1.0 + float(np.linalg.norm(x)))
    for _ in range(4):
        vals = np.empty((x.size, 2))
        clean = True
        for i in range(x.size):
            for s, col in ((+1.0, 0), (-1.0, 1)):
                pt = x.copy()
                pt[i] += s * h
                ev = oracle(pt)
                if not ev.differentiable:
                    clean = False
                    break
                vals[i, col] = ev.value
            if not clean:
                break
        if clean:
            return (vals[:, 0] - vals[:, 1]) / (2.0 * h)
        h /= 10.0
    raise GsError("fd_gradient: stencil kept hitting nondifferentiable points")
