"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest summary.
"""

import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from qtypical import (
    Sampler,
    SamplerConfig,
    TwoModeSpace,
    analytic_coefficients,
    build_observable,
    coefficient_moment_check,
    exact_statistical_variance,
    exact_total_variance,
    fit_expansion,
    loglog_slope,
    make_window,
    mc_decomposition,
    moment_matrix,
    scaling_sweep,
)
from qtypical.cli import main

from conftest import ACCEPTANCE_LINES
from oracles import dense_fluctuations, exact_dense_fluctuations, random_moment, to_fraction


@contextmanager
def criterion(number, title, budget_s):
    start = time.perf_counter()
    detail = {}
    try:
        yield detail
        elapsed = time.perf_counter() - start
        assert elapsed < budget_s, f"runtime {elapsed:.2f}s exceeds {budget_s}s"
    except BaseException as exc:
        ACCEPTANCE_LINES.append(f"FAIL  {number}. {title}: {exc}")
        raise
    extra = ", ".join(f"{k}={v}" for k, v in detail.items())
    ACCEPTANCE_LINES.append(
        f"PASS  {number}. {title} ({time.perf_counter() - start:.2f}s{', ' + extra if extra else ''})"
    )


def test_1_parity_vanishing():
    with criterion(1, "d20 = 0 exactly for nu = 1..10", 1.0):
        for nu in range(1, 11):
            assert analytic_coefficients(nu).d20 == 0


def test_2_d02_recovery():
    with criterion(2, "fit recovers d02 = 1/12 (nu=1) and 3/4 (nu=2)", 5.0) as info:
        grid = [(N, k) for N in (200, 400, 800) for k in (2, 5, 10)]
        f1 = fit_expansion(1, grid)
        assert abs(f1.d02 - 1 / 12) <= 1e-9
        assert abs(f1.d20) <= 1e-9
        f2 = fit_expansion(2, grid)
        assert abs(f2.d02 - 3 / 4) <= 1e-9
        assert f1.exact.d02 == Fraction(1, 12) and f2.exact.d02 == Fraction(3, 4)
        info["d02_err"] = f"{max(abs(f1.d02 - 1 / 12), abs(f2.d02 - 0.75)):.1e}"


def test_3_oracle_equivalence():
    with criterion(3, "exact variance == dense brute force, N <= 12, all k, 50 moments", 30.0) as info:
        rng = np.random.default_rng(2024)
        moments = [random_moment(rng) for _ in range(50)]
        checks = exact_checks = 0
        for m in moments:
            for N in range(0, 13, 2):
                obs = build_observable(TwoModeSpace(N), m)
                ks = range(N // 2 + 1)
                exact_ref = exact_dense_fluctuations(m, N, ks) if m.is_rational else None
                for k in ks:
                    rep = exact_total_variance(make_window(TwoModeSpace(N), k), obs)
                    if exact_ref is not None:
                        mean, dsq, _ = exact_ref[k]
                        assert isinstance(rep.delta_sq, Fraction)
                        assert rep.mean == to_fraction(mean)
                        assert rep.delta_sq == to_fraction(dsq)
                        exact_checks += 1
                    mean, dsq, _ = dense_fluctuations(m, N, k)
                    assert abs(float(rep.mean) - mean) <= 1e-12 * max(1.0, abs(mean))
                    assert abs(float(rep.delta_sq) - dsq) <= 1e-12 * max(1.0, abs(dsq))
                    checks += 1
        info["windows"] = checks
        info["exact"] = exact_checks


def test_4_decomposition_identity():
    with criterion(4, "MC delta_s^2 + delta_q^2 within 5 SE of 10 (N=100, k=5)", 10.0) as info:
        space = TwoModeSpace(100)
        rep = mc_decomposition(
            make_window(space, 5), build_observable(space, moment_matrix(2)), SamplerConfig(), 10_000
        )
        z = (rep.delta_s_sq + rep.delta_q_sq - 10) / rep.stderr["delta_sq"]
        assert abs(z) <= 5
        info["z"] = f"{z:+.2f}"


def test_5_haar_second_moment():
    with criterion(5, "exact delta_s^2 matches MC on 20 configurations", 60.0) as info:
        rng = np.random.default_rng(55)
        worst = 0.0
        for i in range(20):
            N = int(rng.integers(1, 31)) * 2
            k = int(rng.integers(0, N // 2 + 1))
            m = random_moment(rng)
            space = TwoModeSpace(N)
            obs = build_observable(space, m)
            w = make_window(space, k)
            rep = mc_decomposition(w, obs, SamplerConfig(100 + i), 20_000)
            diff = rep.delta_s_sq - float(exact_statistical_variance(w, obs))
            se = rep.stderr["delta_s_sq"]
            if se == 0:
                assert abs(diff) <= 1e-12 * max(1.0, abs(rep.delta_s_sq))
                continue
            worst = max(worst, abs(diff) / se)
            assert abs(diff) <= 5 * se
        info["max_z"] = f"{worst:.2f}"


def test_6_typicality_scaling():
    with criterion(6, "log-log slope -1/2 (alpha=1/2) and -1 (alpha=0)", 5.0) as info:
        Ns = [10**e for e in range(2, 7)]
        s_half = loglog_slope(scaling_sweep(1, 0.5, 1.0, Ns))
        s_zero = loglog_slope(scaling_sweep(1, 0.0, 1.0, Ns))
        assert abs(s_half + 0.5) <= 0.02
        assert abs(s_zero + 1.0) <= 0.02
        info["slopes"] = f"{s_half:.4f},{s_zero:.4f}"


def test_7_non_typicality():
    with criterion(7, "alpha=1, c=1/2: ratio(1e6)/ratio(1e4) in [0.99, 1.01]", 5.0) as info:
        res = scaling_sweep(1, 1.0, 0.5, [10**4, 10**6])
        q = res.rows[1].ratio / res.rows[0].ratio
        assert 0.99 <= q <= 1.01
        info["quotient"] = f"{q:.6f}"


def test_8_coefficient_moments():
    with criterion(8, "coefficient means and covariances for n=3, 1e5 samples", 10.0) as info:
        n, samples = 3, 100_000
        rep = coefficient_moment_check(make_window(TwoModeSpace(10), 1), Sampler(SamplerConfig()), samples)
        assert rep.max_abs_mean <= 5 / np.sqrt(n * samples)
        dev = np.abs(rep.covariance - np.eye(n) / n)
        assert np.all(dev <= 5 * rep.covariance_stderr)
        info["max_cov_z"] = f"{rep.max_cov_zscore:.2f}"


def test_9_determinism(tmp_path):
    with criterion(9, "mc CSV byte-identical across runs and worker counts", 30.0):
        args = ["mc", "--nu", "1", "--N", "100", "--k", "5", "--samples", "10000", "--seed", "42"]
        outs = []
        for i, workers in enumerate((1, 1, 4)):
            path = tmp_path / f"run{i}.csv"
            assert main(args + ["--workers", str(workers), "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] == outs[2]
