from fractions import Fraction

import numpy as np
import pytest

from qtypical import (
    RandomState,
    Sampler,
    SamplerConfig,
    TwoModeSpace,
    build_observable,
    coefficient_moment_check,
    expectation,
    identity_moment,
    make_window,
    micro_average,
    moment_matrix,
    sample_coefficients,
    sample_state,
)


def test_window_members():
    w = make_window(TwoModeSpace(10), 1)
    assert list(w.members) == [-1, 0, 1]
    assert w.dimension == 3
    w0 = make_window(TwoModeSpace(10), 0)
    assert list(w0.members) == [0] and w0.dimension == 1


def test_window_too_wide():
    with pytest.raises(ValueError, match="exceeds"):
        make_window(TwoModeSpace(4), 3)
    with pytest.raises(ValueError):
        make_window(TwoModeSpace(4), -1)


def test_full_ladder_window():
    w = make_window(TwoModeSpace(6), 3)
    assert w.dimension == 7 and w.ladder_slice == slice(0, 7)


def test_single_member_window_is_pure_phase():
    w = make_window(TwoModeSpace(10), 0)
    sampler = Sampler(SamplerConfig(1))
    for _ in range(20):
        z = sample_state(w, sampler).coefficients
        assert abs(abs(z[0]) - 1.0) < 1e-15


@pytest.mark.parametrize("k", [0, 1, 4, 10])
def test_samples_normalized_and_supported(k):
    w = make_window(TwoModeSpace(20), k)
    st = sample_state(w, Sampler(SamplerConfig(5)))
    assert abs(np.linalg.norm(st.coefficients) - 1) < 1e-12
    emb = st.embedded
    assert emb.shape == (21,)
    outside = np.ones(21, bool)
    outside[w.ladder_slice] = False
    assert not np.any(emb[outside])


def test_sampler_determinism():
    w = make_window(TwoModeSpace(10), 2)
    a = sample_state(w, Sampler(SamplerConfig(42, 3))).coefficients
    b = sample_state(w, Sampler(SamplerConfig(42, 3))).coefficients
    c = sample_state(w, Sampler(SamplerConfig(42, 4))).coefficients
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_random_state_validates_norm():
    w = make_window(TwoModeSpace(4), 1)
    with pytest.raises(ValueError):
        RandomState(w, [1, 1, 0])
    with pytest.raises(ValueError):
        RandomState(w, [1, 0])


def test_coefficient_moments_n3():
    w = make_window(TwoModeSpace(10), 1)
    rep = coefficient_moment_check(w, Sampler(SamplerConfig(11)), 100_000)
    assert rep.max_abs_mean <= 5 * np.sqrt(1 / (3 * 100_000))
    assert rep.max_cov_zscore <= 5
    np.testing.assert_allclose(np.diag(rep.covariance).real, 1 / 3, atol=5 * rep.covariance_stderr.max())


def test_coefficient_moments_n1():
    w = make_window(TwoModeSpace(10), 0)
    rep = coefficient_moment_check(w, Sampler(SamplerConfig(2)), 1000)
    assert abs(rep.covariance[0, 0] - 1) < 1e-15
    assert rep.covariance_stderr[0, 0] < 1e-15


def test_coefficient_check_needs_samples():
    with pytest.raises(ValueError):
        coefficient_moment_check(make_window(TwoModeSpace(4), 1), Sampler(), 10)


def test_micro_average_examples():
    space = TwoModeSpace(10)
    w = make_window(space, 1)
    x2 = build_observable(space, moment_matrix(2))
    assert [x2.diagonal[i] for i in range(4, 7)] == [11, 10, 9]
    avg = micro_average(w, x2)
    assert avg == 10 and isinstance(avg, Fraction)
    for k in range(6):
        assert micro_average(make_window(space, k), build_observable(space, identity_moment())) == 10
        assert micro_average(make_window(space, k), build_observable(space, moment_matrix(1))) == 0


def test_micro_average_dimension_mismatch():
    with pytest.raises(ValueError):
        micro_average(make_window(TwoModeSpace(10), 1), build_observable(TwoModeSpace(8), moment_matrix(2)))


def test_micro_average_is_sampling_mean():
    space = TwoModeSpace(16)
    w = make_window(space, 3)
    obs = build_observable(space, moment_matrix(3).shifted(Fraction(1, 3)))
    sampler = Sampler(SamplerConfig(8))
    vals = np.array([expectation(sample_state(w, sampler), obs) for _ in range(4000)])
    se = vals.std(ddof=1) / np.sqrt(vals.size)
    assert abs(vals.mean() - float(micro_average(w, obs))) <= 5 * se


def test_phase_invariance():
    space = TwoModeSpace(12)
    w = make_window(space, 3)
    obs = build_observable(space, moment_matrix(1))
    st = sample_state(w, Sampler(SamplerConfig(4)))
    rotated = RandomState(w, np.exp(0.73j) * st.coefficients)
    assert expectation(rotated, obs) == pytest.approx(expectation(st, obs), abs=1e-13)


def test_unitary_invariance_of_expectation_distribution():
    space = TwoModeSpace(20)
    w = make_window(space, 2)
    obs = build_observable(space, moment_matrix(2))
    rng = np.random.default_rng(99)
    g = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    q, r = np.linalg.qr(g)
    U = q * (np.diag(r) / abs(np.diag(r)))

    z = sample_coefficients(w, Sampler(SamplerConfig(21)), 20_000)
    diag = obs.diagonal_float()[w.ladder_slice]
    plain = (abs(z) ** 2) @ diag
    rotated = (abs(z @ U.T) ** 2) @ diag
    for f in (lambda v: v, lambda v: v**2):
        a, b = f(plain), f(rotated)
        se = np.hypot(a.std(ddof=1), b.std(ddof=1)) / np.sqrt(a.size)
        assert abs(a.mean() - b.mean()) <= 5 * se
