"""Backtracking Armijo line search, its nonmonotone relaxation, and the
budgeted variant that takes null steps when trial evaluations run out."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import GsError


@dataclass(frozen=True)
class LineSearchOutcome:
    t: float
    accepted: bool
    n_evals: int
    null_step: bool


def armijo_backtrack(
    value_at: Callable[[np.ndarray], float],
    x: np.ndarray,
    f_x: float,
    g: np.ndarray,
    beta: float,
    gamma: float,
    g_norm_sq: float,
    delta_k: float = 0.0,
    budget: Optional[int] = None,
    t_min: float = 1e-16,
) -> LineSearchOutcome:
    """Largest t in {1, gamma, gamma^2, ...} with
    value_at(x - t*g) < f_x - beta*t*g_norm_sq + delta_k.

    g is the direction-defining vector (the step is x - t*g; callers pass a
    pre-scaled vector for non-default direction modes, with g_norm_sq the
    matching decrease coefficient). With a budget, exhausting it without
    acceptance returns a null step (t = 0); without one, t dropping below
    t_min returns accepted = False.
    """
    t = 1.0
    n_evals = 0
    while True:
        trial = x - t * g
        val = value_at(trial)
        n_evals += 1
        if not math.isfinite(val):
            raise GsError(f"non-finite trial value {val!r} at t={t} (point {trial.tolist()})")
        if val < f_x - beta * t * g_norm_sq + delta_k:
            return LineSearchOutcome(t=t, accepted=True, n_evals=n_evals, null_step=False)
        if budget is not None and n_evals >= budget:
            return LineSearchOutcome(t=0.0, accepted=False, n_evals=n_evals, null_step=True)
        t_next = gamma * t
        if budget is None and t_next < t_min:
            return LineSearchOutcome(t=0.0, accepted=False, n_evals=n_evals, null_step=False)
        if t_next == 0.0:  # underflow guard for pathological budgets
            return LineSearchOutcome(t=0.0, accepted=False, n_evals=n_evals, null_step=True)
        t = t_next


def delta_sequence(k: int, delta0: float) -> float:
    """Summable nonmonotone slack Delta_k = delta0 / (k+1)^2; the total
    allowance over a whole run is delta0 * pi^2 / 6."""
    if delta0 < 0:
        raise ValueError("delta0 must be nonnegative")
    return delta0 / float(k + 1) ** 2
