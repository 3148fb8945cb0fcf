"""Typicality of collective observables for Haar-random states of a two-mode Bose gas."""

from .ensemble import (
    DEFAULT_SEED,
    MomentCheck,
    RandomState,
    Sampler,
    SamplerConfig,
    Window,
    coefficient_moment_check,
    make_window,
    micro_average,
    sample_coefficients,
    sample_state,
)
from .fluctuations import (
    FluctuationReport,
    exact_statistical_variance,
    exact_total_variance,
    expectation,
    jackknife,
    mc_decomposition,
    quantum_variance,
    typicality_ratio,
)
from .fock import (
    CapacityError,
    CollectiveObservable,
    Moment,
    MomentMatrix,
    TwoModeSpace,
    apply,
    build_observable,
    identity_moment,
    moment_matrix,
    oscillator_moment,
    squared_band,
    to_dense,
)
from .scaling import (
    DEFAULT_FIT_GRID,
    DegenerateGridError,
    ExpansionCoefficients,
    FitResult,
    SweepResult,
    SweepRow,
    analytic_coefficients,
    exact_case_variance,
    fit_expansion,
    half_width_for,
    loglog_slope,
    scaling_sweep,
)

__version__ = "0.1.0"
