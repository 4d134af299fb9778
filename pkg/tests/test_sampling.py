import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradsamp import BallSampler, perturb_within, sample_ball


def test_zero_radius_returns_center_copies():
    s = BallSampler(seed=0)
    pts = sample_ball(np.zeros(3), 0.0, 3, s)
    assert len(pts) == 3
    for p in pts:
        assert np.array_equal(p, np.zeros(3))
    assert s.position == 0  # degenerate ball consumes no randomness


def test_containment_in_unit_ball():
    s = BallSampler(seed=42)
    center = np.array([10.0, 10.0])
    for p in sample_ball(center, 1.0, 30, s):
        assert np.linalg.norm(p - center) <= 1.0 + 1e-12


def test_same_seed_bitwise_equal():
    a = BallSampler(seed=7)
    b = BallSampler(seed=7)
    pa = sample_ball(np.zeros(4), 2.0, 50, a)
    pb = sample_ball(np.zeros(4), 2.0, 50, b)
    assert all(np.array_equal(x, y) for x, y in zip(pa, pb))
    assert a.position == b.position


def test_position_reopens_stream_mid_way():
    a = BallSampler(seed=3)
    sample_ball(np.zeros(3), 1.0, 5, a)
    checkpoint = a.position
    rest_a = sample_ball(np.zeros(3), 1.0, 5, a)
    b = BallSampler(seed=3, position=checkpoint)
    rest_b = sample_ball(np.zeros(3), 1.0, 5, b)
    assert all(np.array_equal(x, y) for x, y in zip(rest_a, rest_b))


def test_mean_norm_matches_uniform_ball():
    # E||X|| = n/(n+1) = 2/3 for the n=2 unit ball
    s = BallSampler(seed=123)
    pts = np.array(sample_ball(np.zeros(2), 1.0, 100_000, s))
    mean = np.linalg.norm(pts, axis=1).mean()
    assert abs(mean - 2.0 / 3.0) < 0.005


def test_radial_cdf_within_binomial_bounds():
    s = BallSampler(seed=9)
    pts = np.array(sample_ball(np.zeros(2), 1.0, 100_000, s))
    norms = np.linalg.norm(pts, axis=1)
    n = norms.size
    for r in (0.25, 0.5, 0.75):
        p = r * r  # P(||X|| <= r) on the n=2 unit ball
        observed = float((norms <= r).mean())
        sigma = np.sqrt(p * (1.0 - p) / n)
        assert abs(observed - p) <= 3.0 * sigma


def test_perturb_within_containment_and_determinism():
    y1 = perturb_within(np.array([0.0, 5.0]), 0.1, BallSampler(seed=5))
    y2 = perturb_within(np.array([0.0, 5.0]), 0.1, BallSampler(seed=5))
    d = np.linalg.norm(y1 - np.array([0.0, 5.0]))
    assert 0.0 < d <= 0.1
    assert np.array_equal(y1, y2)


def test_perturb_within_never_returns_center_at_tiny_bound():
    center = np.zeros(2)
    y = perturb_within(center, 1e-300, BallSampler(seed=1))
    assert not np.array_equal(y, center)
    assert np.linalg.norm(y - center) <= max(1e-300, 5e-324 * 2)


def test_perturb_within_rejects_nonpositive_bound():
    with pytest.raises(ValueError):
        perturb_within(np.zeros(2), 0.0, BallSampler(seed=0))


def test_sample_ball_rejects_bad_inputs():
    s = BallSampler(seed=0)
    with pytest.raises(ValueError):
        sample_ball(np.zeros(2), -1.0, 1, s)
    with pytest.raises(ValueError):
        sample_ball(np.array([np.inf, 0.0]), 1.0, 1, s)
    with pytest.raises(ValueError):
        BallSampler(seed=-1)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(1, 8),
    radius=st.floats(1e-12, 1e6),
    count=st.integers(1, 12),
)
def test_containment_property(seed, n, radius, count):
    s = BallSampler(seed=seed)
    center = np.full(n, 1.5)
    for p in sample_ball(center, radius, count, s):
        assert np.linalg.norm(p - center) <= radius * (1.0 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), count=st.integers(0, 9))
def test_position_counts_consumed_doubles(seed, count):
    s = BallSampler(seed=seed)
    sample_ball(np.zeros(3), 1.0, count, s)
    per_point = 4 + 1  # two Box-Muller pairs for n=3, then one radial draw
    assert s.position == count * per_point
