import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradsamp import GsError, armijo_backtrack, delta_sequence


def quad(x):
    return 0.5 * float(x @ x)


def test_full_step_on_quadratic():
    x = np.array([1.0, 0.0])
    out = armijo_backtrack(quad, x, quad(x), np.array([1.0, 0.0]),
                           beta=1e-4, gamma=0.5, g_norm_sq=1.0)
    assert out.accepted and out.t == 1.0 and out.n_evals == 1
    assert not out.null_step


def test_full_step_on_abs_with_large_beta():
    f = lambda x: float(np.abs(x).sum())
    x = np.array([1.0])
    out = armijo_backtrack(f, x, 1.0, np.array([1.0]),
                           beta=0.9, gamma=0.5, g_norm_sq=1.0)
    assert out.accepted and out.t == 1.0


def test_backtracks_until_decrease():
    # f(x) = x^2 from x=1 along g=4 (overshooting direction): t=1, 0.5 fail
    f = lambda x: float(x[0] ** 2)
    out = armijo_backtrack(f, np.array([1.0]), 1.0, np.array([4.0]),
                           beta=1e-4, gamma=0.5, g_norm_sq=16.0)
    assert out.accepted
    assert out.t == 0.25
    # maximality: the previous trial t/gamma failed the test
    t_prev = out.t / 0.5
    assert not f(np.array([1.0 - t_prev * 4.0])) < 1.0 - 1e-4 * t_prev * 16.0


def test_budget_exhaustion_returns_null_step():
    f = lambda x: float(x[0] ** 2)
    out = armijo_backtrack(f, np.array([1.0]), 1.0, np.array([4.0]),
                           beta=1e-4, gamma=0.5, g_norm_sq=16.0, budget=2)
    assert out.null_step and out.t == 0.0 and not out.accepted
    assert out.n_evals == 2


def test_unbudgeted_failure_below_t_min():
    rising = lambda x: 2.0  # no trial ever decreases
    out = armijo_backtrack(rising, np.array([1.0]), 1.0, np.array([1.0]),
                           beta=1e-4, gamma=0.5, g_norm_sq=1.0, t_min=1e-3)
    assert not out.accepted and not out.null_step and out.t == 0.0
    # trials at t = 2^0 .. 2^-9; the next halving would cross t_min
    assert out.n_evals == 10


def test_nonmonotone_slack_admits_increase():
    flat = lambda x: 1.0  # value never drops
    out = armijo_backtrack(flat, np.array([1.0]), 1.0, np.array([1.0]),
                           beta=0.5, gamma=0.5, g_norm_sq=1.0, delta_k=0.75)
    # accepted as soon as beta*t*||g||^2 < delta_k: t=1 gives 0.5 < 0.75
    assert out.accepted and out.t == 1.0


def test_non_finite_trial_is_a_hard_error():
    f = lambda x: math.inf
    with pytest.raises(GsError):
        armijo_backtrack(f, np.array([1.0]), 1.0, np.array([1.0]),
                         beta=1e-4, gamma=0.5, g_norm_sq=1.0)


def test_delta_sequence_values():
    assert delta_sequence(0, 1.0) == 1.0
    assert delta_sequence(3, 1.0) == 1.0 / 16.0
    assert delta_sequence(5, 0.0) == 0.0
    with pytest.raises(ValueError):
        delta_sequence(0, -1.0)


def test_delta_sequence_partial_sums_bounded():
    delta0 = 0.37
    total = sum(delta_sequence(k, delta0) for k in range(100_000))
    assert total <= delta0 * math.pi**2 / 6.0 + 1e-9


@settings(max_examples=60, deadline=None)
@given(
    beta=st.floats(1e-6, 0.99),
    gamma=st.floats(0.1, 0.9),
    scale=st.floats(0.1, 10.0),
)
def test_accepted_steps_satisfy_armijo_exactly(beta, gamma, scale):
    g = np.array([scale, 0.0])
    gsq = float(g @ g)
    x = np.array([1.0, 2.0])
    out = armijo_backtrack(quad, x, quad(x), g, beta=beta, gamma=gamma,
                           g_norm_sq=gsq)
    if out.accepted:
        assert quad(x - out.t * g) < quad(x) - beta * out.t * gsq
        assert out.t <= 1.0


@settings(max_examples=40, deadline=None)
@given(budget=st.integers(1, 6))
def test_budget_is_respected(budget):
    calls = []
    f = lambda x: calls.append(1) or 3.0
    out = armijo_backtrack(f, np.array([0.0]), 1.0, np.array([1.0]),
                           beta=0.5, gamma=0.5, g_norm_sq=1.0, budget=budget)
    assert len(calls) == budget
    assert out.null_step and out.n_evals == budget
