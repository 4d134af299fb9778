import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gradsamp import (
    GsParams,
    InvalidParams,
    Status,
    VariantConfig,
    classify_termination,
    default_params,
    param_violations,
    params_from_dict,
    params_to_dict,
    record_from_dict,
    record_to_dict,
    validate_params,
    with_overrides,
)


def test_reference_defaults_validate():
    p = GsParams(
        epsilon0=0.1, nu0=1e-6, sample_size=3, beta=1e-4, gamma=0.5,
        theta_eps=0.1, theta_nu=0.1,
    )
    assert validate_params(p, 2) is p
    assert param_violations(p, 2) == []


def test_beta_out_of_range_reported():
    p = GsParams(epsilon0=0.1, beta=1.0)
    assert "beta must lie in (0,1)" in param_violations(p, 1)
    with pytest.raises(InvalidParams):
        validate_params(p, 1)


def test_sample_size_below_n_plus_one():
    p = GsParams(epsilon0=0.1, sample_size=5)
    errs = param_violations(p, 5)
    assert any("m >= n+1" in e for e in errs)
    # adaptive sampling lifts the n+1 floor on the fresh-sample count
    adaptive = VariantConfig(sampling_mode="adaptive", m_min=2, m_max=8)
    p2 = GsParams(epsilon0=0.1, sample_size=2, variant=adaptive)
    assert param_violations(p2, 5) == []


def test_validation_is_idempotent():
    p = GsParams(epsilon0=0.25, sample_size=6)
    assert validate_params(validate_params(p, 2), 2) == p


def test_invalid_params_lists_every_violation():
    p = GsParams(epsilon0=-1.0, beta=2.0, gamma=0.0, max_iter=0)
    errs = param_violations(p, 1)
    assert len(errs) >= 4
    with pytest.raises(InvalidParams) as exc:
        validate_params(p, 1)
    assert exc.value.errors == errs


def test_drop_center_requires_nonmonotone():
    v = VariantConfig(nondiff_strategy="drop_center_gradient")
    errs = param_violations(GsParams(epsilon0=0.1, variant=v), 1)
    assert any("nonmonotone" in e for e in errs)


def test_default_params_scales_to_start():
    p = default_params(np.array([3.0, 4.0]))
    assert p.epsilon0 == pytest.approx(0.5)
    assert p.sample_size == 4
    p10 = default_params(np.zeros(10), seed=3)
    assert p10.sample_size == 20
    assert p10.seed == 3


def test_classify_gradient_zero(record_factory, base_params):
    rec = record_factory(g_k=np.zeros(2), g_norm=0.0, epsilon_k=1.0, t_k=0.0)
    assert classify_termination(rec, base_params()) is Status.GRADIENT_ZERO
    # with nu_opt = 0 an exact zero wins at any radius
    rec2 = record_factory(g_k=np.zeros(2), g_norm=0.0, epsilon_k=1e-9, t_k=0.0)
    assert (
        classify_termination(rec2, base_params(nu_opt=0.0))
        is Status.GRADIENT_ZERO
    )


def test_classify_tolerance_met(record_factory, base_params):
    rec = record_factory(g_norm=1e-7, epsilon_k=1e-6, t_k=0.0)
    assert classify_termination(rec, base_params()) is Status.TOLERANCE_MET


def test_classify_max_iterations(record_factory, base_params):
    rec = record_factory(g_norm=0.5, epsilon_k=0.1, t_k=0.3)
    assert classify_termination(rec, base_params()) is Status.MAX_ITERATIONS


def test_classify_unbounded_and_line_search(record_factory, base_params):
    rec = record_factory(f_x=-1e13, g_norm=0.5, t_k=0.3)
    assert classify_termination(rec, base_params()) is Status.UNBOUNDED
    stalled = record_factory(g_norm=0.5, t_k=0.0, null_step=False)
    assert (
        classify_termination(stalled, base_params())
        is Status.LINE_SEARCH_FAILURE
    )
    nulled = record_factory(g_norm=0.5, t_k=0.0, null_step=True)
    assert classify_termination(nulled, base_params()) is Status.MAX_ITERATIONS


def test_params_json_round_trip():
    v = VariantConfig(
        direction_mode="trust_region", scaling_mode="bb", reuse_gradients=True,
        matrix=np.diag([1.0, 2.0]),
    )
    p = GsParams(epsilon0=0.3, sample_size=7, seed=11, variant=v)
    d = params_to_dict(p)
    text = json.dumps(d)  # must be JSON-ready as-is
    q = params_from_dict(json.loads(text))
    assert q.epsilon0 == p.epsilon0 and q.seed == 11
    assert q.variant.direction_mode == "trust_region"
    assert np.array_equal(q.variant.matrix, v.matrix)


def test_with_overrides_touches_only_named_fields():
    p = GsParams(epsilon0=0.1, seed=5)
    q = with_overrides(p, beta=0.01, variant={"reuse_gradients": True})
    assert q.beta == 0.01 and q.seed == 5
    assert q.variant.reuse_gradients and not p.variant.reuse_gradients


def test_record_round_trip_and_field_order(record_factory):
    rec = record_factory(perturbed=True)
    d = record_to_dict(rec)
    assert list(d)[:4] == ["k", "x", "f_x", "grad_x"]
    back = record_from_dict(json.loads(json.dumps(d)))
    assert back.k == rec.k and back.perturbed
    assert np.array_equal(back.x, rec.x)
    none_grad = record_factory(grad_x=None)
    assert record_to_dict(none_grad)["grad_x"] is None
    assert record_from_dict(record_to_dict(none_grad)).grad_x is None


@given(
    beta=st.floats(0.0001, 0.9999),
    gamma=st.floats(0.0001, 0.9999),
    theta=st.floats(0.0001, 1.0),
    m=st.integers(1, 64),
    n=st.integers(1, 16),
)
def test_violation_list_matches_validity(beta, gamma, theta, m, n):
    p = GsParams(
        epsilon0=0.1, beta=beta, gamma=gamma, theta_eps=theta,
        theta_nu=theta, sample_size=m,
    )
    errs = param_violations(p, n)
    if m >= n + 1:
        assert errs == []
    else:
        assert errs == ["m >= n+1 required (fixed_m sampling)"]
