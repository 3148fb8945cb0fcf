"""Two-mode case study: expansion coefficients, closed-form variances, fits and sweeps.

For X = sum_ij m_ij a_i^dag a_j on the window |l| <= k of the N-particle
ladder, with Var(l) = k(k+1)/3 = (n^2 - 1)/12,

    mean     = (N/2)(m00 + m11)
    delta^2  = (m11 - m00)^2 Var(l) + 2|m01|^2 (N^2/4 + N/2 - Var(l)).

So the coefficient of N^2/4 is 2|m01|^2, and for even powers (m01 = 0) the
coefficient of n^2 is (m11 - m00)^2 / 12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ensemble import SamplerConfig, make_window
from .fluctuations import exact_total_variance, mc_decomposition
from .fock import DEFAULT_P_MAX, MomentMatrix, TwoModeSpace, build_observable, moment_matrix

__all__ = [
    "DegenerateGridError",
    "ExpansionCoefficients",
    "FitResult",
    "SweepRow",
    "SweepResult",
    "DEFAULT_FIT_GRID",
    "analytic_coefficients",
    "exact_case_variance",
    "fit_expansion",
    "half_width_for",
    "scaling_sweep",
    "loglog_slope",
]

DEFAULT_FIT_GRID = tuple((N, k) for N in (200, 400, 800) for k in (2, 5, 10))

REMAINDER = "O(N): 2|m01|^2 N/2 plus a constant; vanishes identically for even powers"


class DegenerateGridError(ValueError):
    """The (N, k) grid cannot separate the expansion terms."""


def _resolve_moment(nu, power, p_max) -> tuple[int, MomentMatrix]:
    if power is None:
        if nu is None or nu < 1:
            raise ValueError(f"nu must be a positive integer, got {nu!r}")
        power = 2 * nu
    elif power < 0:
        raise ValueError(f"power must be non-negative, got {power}")
    return power, moment_matrix(power, p_max=p_max)


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Exact coefficients of delta^2 in the basis {N^2/4, n^2, N, 1}.

    ``d02`` is the (m11 - m00)^2 / 12 coefficient; ``n2_coefficient`` adds the
    ``-|m01|^2 / 6`` contribution present only for odd powers.
    """

    nu: int | None
    power: int
    d20: Fraction
    d02: Fraction
    n2_coefficient: Fraction
    n_coefficient: Fraction
    constant: Fraction
    remainder_bound: str = REMAINDER


def analytic_coefficients(
    nu: int | None = None, *, power: int | None = None, p_max: int = DEFAULT_P_MAX
) -> ExpansionCoefficients:
    power, m = _resolve_moment(nu, power, p_max)
    csq = m.cross_sq
    diff_sq = (m.m11 - m.m00) ** 2
    return ExpansionCoefficients(
        nu=nu,
        power=power,
        d20=2 * csq,
        d02=diff_sq / 12,
        n2_coefficient=(diff_sq - 2 * csq) / 12,
        n_coefficient=csq,
        constant=(2 * csq - diff_sq) / 12,
    )


def exact_case_variance(
    nu: int | None, N: int, k: int, *, power: int | None = None, p_max: int = DEFAULT_P_MAX
) -> tuple[Fraction, Fraction]:
    """Closed-form (mean, delta^2) for the x^(2 nu) observable; no matrices involved."""
    power, m = _resolve_moment(nu, power, p_max)
    make_window(TwoModeSpace(N), k)  # validates N and k
    var_l = Fraction(k * (k + 1), 3)
    mean = Fraction(N, 2) * (m.m00 + m.m11)
    delta_sq = (m.m11 - m.m00) ** 2 * var_l + 2 * m.cross_sq * (
        Fraction(N * N, 4) + Fraction(N, 2) - var_l
    )
    return mean, delta_sq


@dataclass(frozen=True)
class FitResult:
    d20: float
    d02: float
    n_coefficient: float
    constant: float
    max_residual: float
    exact: ExpansionCoefficients
    grid: tuple = field(repr=False)


def fit_expansion(
    nu: int | None,
    grid=DEFAULT_FIT_GRID,
    *,
    power: int | None = None,
    p_max: int = DEFAULT_P_MAX,
) -> FitResult:
    """Least-squares fit of the exact window variance to ``{N^2/4, n^2, N, 1}``.

    Variances come from the banded observable (the generic trace path), not
    from the closed form.  The returned ``d02`` is the fitted n^2 coefficient.
    """
    power, m = _resolve_moment(nu, power, p_max)
    grid = tuple((int(N), int(k)) for N, k in grid)
    if len({N for N, _ in grid}) < 3 or len({2 * k + 1 for _, k in grid}) < 3:
        raise DegenerateGridError("grid needs at least 3 distinct N and 3 distinct n")

    design, target = [], []
    observables = {}
    for N, k in grid:
        if N not in observables:
            observables[N] = build_observable(TwoModeSpace(N), m)
        rep = exact_total_variance(make_window(TwoModeSpace(N), k), observables[N])
        n = 2 * k + 1
        design.append([N * N / 4, n * n, N, 1.0])
        target.append(float(rep.delta_sq))
    A = np.array(design)
    y = np.array(target)
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise DegenerateGridError("design matrix is rank deficient")
    scale = np.linalg.norm(A, axis=0)
    coef, *_ = np.linalg.lstsq(A / scale, y, rcond=None)
    coef = coef / scale
    residual = y - A @ coef
    return FitResult(
        d20=float(coef[0]),
        d02=float(coef[1]),
        n_coefficient=float(coef[2]),
        constant=float(coef[3]),
        max_residual=float(np.abs(residual).max()),
        exact=analytic_coefficients(nu, power=power, p_max=p_max),
        grid=grid,
    )


def half_width_for(N: int, alpha: float, c: float) -> int:
    """k = round_half_up(c N^alpha / 2), clamped to [0, N/2]."""
    k = math.floor(c * float(N) ** alpha / 2 + 0.5)
    return int(min(max(k, 0), N // 2))


@dataclass(frozen=True)
class SweepRow:
    nu: int
    N: int
    k: int
    n: int
    mean: object
    delta_sq: object
    ratio: float | None
    method: str = "exact"
    stderr: dict | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    nu: int
    alpha: float
    c: float
    seed: int | None = None

    def exact_rows(self):
        return [r for r in self.rows if r.method == "exact"]


def scaling_sweep(
    nu: int,
    alpha: float,
    c: float,
    N_list,
    *,
    mc_samples: int = 0,
    config: SamplerConfig | None = None,
    workers: int = 1,
) -> SweepResult:
    """Exact (mean, delta^2, ratio) for n ~ c N^alpha; optional Monte Carlo rows."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    N_list = sorted(int(N) for N in N_list)
    if not N_list:
        raise ValueError("N_list is empty")
    rows = []
    for N in N_list:
        k = half_width_for(N, alpha, c)
        mean, dsq = exact_case_variance(nu, N, k)
        ratio = None if mean == 0 else math.sqrt(dsq) / abs(float(mean))
        rows.append(SweepRow(nu, N, k, 2 * k + 1, mean, dsq, ratio))
        if mc_samples:
            space = TwoModeSpace(N)
            rep = mc_decomposition(
                make_window(space, k),
                build_observable(space, moment_matrix(2 * nu)),
                config,
                mc_samples,
                workers=workers,
            )
            rows.append(
                SweepRow(nu, N, k, 2 * k + 1, rep.mean, rep.delta_sq, rep.ratio,
                         "monte-carlo", rep.stderr)
            )
    seed = (config or SamplerConfig()).master_seed if mc_samples else None
    return SweepResult(tuple(rows), nu, alpha, c, seed)


def loglog_slope(result: SweepResult) -> float:
    """Least-squares slope of log(ratio) against log(N) over the exact rows."""
    pts = [(r.N, r.ratio) for r in result.exact_rows() if r.ratio]
    if len(pts) < 2:
        raise ValueError("need at least two rows with a positive ratio")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])
