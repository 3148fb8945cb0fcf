"""Fluctuations of an observable over a random-state ensemble.

For states drawn uniformly from a window of dimension n:

* ``delta_s_sq`` - variance of the expectation value across states,
* ``delta_q_sq`` - ensemble mean of the per-state quantum variance,
* ``delta_sq``   - their sum, which equals the variance of the observable on
  the maximally mixed state of the window and only needs traces.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ensemble import (
    RandomState,
    Sampler,
    SamplerConfig,
    Window,
    _check_compatible,
    micro_average,
    sample_coefficients,
)
from .fock import CollectiveObservable, apply, squared_band

__all__ = [
    "IMAG_TOL",
    "FluctuationReport",
    "expectation",
    "quantum_variance",
    "exact_total_variance",
    "exact_statistical_variance",
    "mc_decomposition",
    "typicality_ratio",
    "jackknife",
]

IMAG_TOL = 1e-12
MC_BLOCK_SIZE = 1000
JACKKNIFE_GROUPS = 100


@dataclass(frozen=True)
class FluctuationReport:
    mean: object
    delta_sq: object
    delta_s_sq: object
    delta_q_sq: object
    ratio: float | None
    method: str
    stderr: dict | None = None
    num_samples: int | None = None

    @property
    def ratio_defined(self) -> bool:
        return self.ratio is not None


def _ratio(mean, delta_sq) -> float | None:
    if mean == 0:
        return None
    return math.sqrt(max(float(delta_sq), 0.0)) / abs(float(mean))


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise ValueError(
            f"{what} has imaginary part {value.imag:.3e}; observable is not Hermitian"
        )
    return float(value.real)


def _state_vector(state: RandomState, observable: CollectiveObservable) -> np.ndarray:
    _check_compatible(state.window, observable)
    return state.embedded


def expectation(state: RandomState, observable: CollectiveObservable) -> float:
    """``<phi|A|phi>`` for a normalized state."""
    v = _state_vector(state, observable)
    return _real(np.vdot(v, apply(observable, v)), "expectation value")


def quantum_variance(state: RandomState, observable: CollectiveObservable) -> float:
    """``<phi|A^2|phi> - <phi|A|phi>^2``, evaluated as ``||(A - <A>) phi||^2``."""
    v = _state_vector(state, observable)
    av = apply(observable, v)
    mu = _real(np.vdot(v, av), "expectation value")
    r = av - mu * v
    return float(np.vdot(r, r).real)


def _window_traces(window: Window, observable: CollectiveObservable):
    """(tr P A, tr P A^2, tr (P A P)^2) over the window members."""
    sl = window.ladder_slice
    exact = observable.has_exact_traces
    diag = observable.diagonal if exact else observable.diagonal_float()
    csq = observable.coupling_sq
    main, _, _ = squared_band(observable)
    zero = Fraction(0) if exact else 0.0
    t = sum(diag[sl], zero)
    t2 = sum(main[sl], zero)
    # couplings with both ends in the window: pairs (start, start+1) .. (stop-2, stop-1)
    inner = csq[sl.start : sl.stop - 1]
    s = sum(diag[sl] * diag[sl], zero) + 2 * sum(inner, zero)
    if not exact:
        t, t2, s = float(t), float(t2), float(s)
    return t, t2, s


def exact_statistical_variance(window: Window, observable: CollectiveObservable):
    """Variance of ``<phi|A|phi>`` over Haar-random ``phi`` in the window.

    Second Haar moment: E[<A>^2] = (tr(A_P)^2 + tr(A_P^2)) / (n (n + 1)),
    with A_P the compression of A to the window.
    """
    _check_compatible(window, observable)
    n = window.dimension
    t, _, s = _window_traces(window, observable)
    return (t * t + s) / (n * (n + 1)) - (t / n) ** 2


def exact_total_variance(window: Window, observable: CollectiveObservable) -> FluctuationReport:
    """Full exact decomposition from traces; ``delta_q_sq`` is the remainder."""
    _check_compatible(window, observable)
    n = window.dimension
    t, t2, _ = _window_traces(window, observable)
    mean = t / n
    delta_sq = t2 / n - mean * mean
    delta_s_sq = exact_statistical_variance(window, observable)
    return FluctuationReport(
        mean=mean,
        delta_sq=delta_sq,
        delta_s_sq=delta_s_sq,
        delta_q_sq=delta_sq - delta_s_sq,
        ratio=_ratio(mean, delta_sq),
        method="exact",
    )


def typicality_ratio(window: Window, observable: CollectiveObservable) -> float | None:
    """``delta / |mean|`` on the window, or None when the mean vanishes."""
    return exact_total_variance(window, observable).ratio


def _local_band(window: Window, observable: CollectiveObservable, center: float):
    """Band of ``A - center`` restricted to the window plus one ladder site each side."""
    sl = window.ladder_slice
    lo = max(0, sl.start - 1)
    hi = min(observable.dimension, sl.stop + 1)
    diag = observable.diagonal_float()[lo:hi] - center
    coupling = observable.coupling[lo : hi - 1]
    return diag, coupling, sl.start - lo


def _block_statistics(z, diag, coupling, offset):
    """Per-sample centered expectation and quantum variance for a block of states."""
    m, n = z.shape
    phi = np.zeros((m, diag.size), dtype=complex)
    phi[:, offset : offset + n] = z
    bphi = diag * phi
    if coupling.size and np.any(coupling):
        bphi[:, 1:] += coupling * phi[:, :-1]
        bphi[:, :-1] += np.conj(coupling) * phi[:, 1:]
    raw = np.einsum("ij,ij->i", np.conj(phi), bphi)
    scale = np.maximum(1.0, np.abs(raw.real))
    if np.any(np.abs(raw.imag) > IMAG_TOL * scale):
        raise ValueError("expectation value has a large imaginary part; observable is not Hermitian")
    b = raw.real
    r = bphi - b[:, None] * phi
    q = np.einsum("ij,ij->i", np.conj(r), r).real
    return b, q


def jackknife(estimator, columns, groups: int = JACKKNIFE_GROUPS):
    """Delete-one-group jackknife of ``estimator(*column_sums, count)``.

    ``columns`` are per-sample arrays; the estimator receives the column sums
    over the retained samples and the retained count, so leave-out values are
    formed from group sums in O(samples).  Returns (estimate, stderr).
    """
    cols = [np.asarray(c, dtype=float) for c in columns]
    m = cols[0].size
    g = min(groups, m)
    bounds = np.linspace(0, m, g + 1).astype(int)
    group_sums = [np.add.reduceat(c, bounds[:-1]) for c in cols]
    counts = np.diff(bounds)
    totals = [c.sum() for c in cols]
    full = estimator(*totals, m)
    loo = np.array(
        [estimator(*(t - s[i] for t, s in zip(totals, group_sums)), m - counts[i]) for i in range(g)]
    )
    se = math.sqrt((g - 1) / g * float(np.sum((loo - loo.mean()) ** 2)))
    return float(full), se


def _sample_variance(s1, s2, count):
    return (s2 - s1 * s1 / count) / (count - 1)


def mc_decomposition(
    window: Window,
    observable: CollectiveObservable,
    config: SamplerConfig | None = None,
    num_samples: int = 10_000,
    *,
    workers: int = 1,
    block_size: int = MC_BLOCK_SIZE,
) -> FluctuationReport:
    """Monte Carlo estimate of the fluctuation decomposition with jackknife errors.

    Samples are split into fixed blocks of ``block_size``; block ``b`` draws
    from its own stream ``(master_seed, stream_index, b)``.  Results therefore
    do not depend on ``workers``.
    """
    _check_compatible(window, observable)
    if num_samples < 100:
        raise ValueError(f"num_samples must be at least 100, got {num_samples}")
    config = config or SamplerConfig()
    center = micro_average(window, observable)
    diag, coupling, offset = _local_band(window, observable, float(center))

    sizes = [min(block_size, num_samples - start) for start in range(0, num_samples, block_size)]

    def run(block):
        z = sample_coefficients(window, Sampler.for_block(config, block), sizes[block])
        return _block_statistics(z, diag, coupling, offset)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(b) for b in range(len(sizes))]
    b = np.concatenate([p[0] for p in parts])
    q = np.concatenate([p[1] for p in parts])

    cols = (b, b * b, q)
    ds, ds_se = jackknife(lambda s1, s2, sq, c: _sample_variance(s1, s2, c), cols)
    dq, dq_se = jackknife(lambda s1, s2, sq, c: sq / c, cols)
    tot, tot_se = jackknife(lambda s1, s2, sq, c: _sample_variance(s1, s2, c) + sq / c, cols)
    shift, mean_se = jackknife(lambda s1, s2, sq, c: s1 / c, cols)
    mean = float(center) + shift
    return FluctuationReport(
        mean=mean,
        delta_sq=tot,
        delta_s_sq=ds,
        delta_q_sq=dq,
        ratio=_ratio(mean, tot),
        method="monte-carlo",
        stderr={"mean": mean_se, "delta_sq": tot_se, "delta_s_sq": ds_se, "delta_q_sq": dq_se},
        num_samples=num_samples,
    )
