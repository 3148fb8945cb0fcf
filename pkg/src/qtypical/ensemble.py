"""Microcanonical windows and Haar-uniform random states on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fock import CollectiveObservable, TwoModeSpace

__all__ = [
    "DEFAULT_SEED",
    "Window",
    "RandomState",
    "SamplerConfig",
    "Sampler",
    "MomentCheck",
    "make_window",
    "sample_state",
    "sample_coefficients",
    "coefficient_moment_check",
    "micro_average",
]

DEFAULT_SEED = 20140607


@dataclass(frozen=True)
class Window:
    """Symmetric set of imbalances ``-k..k`` inside the ladder; ``n = 2k + 1``."""

    space: TwoModeSpace
    half_width: int

    def __post_init__(self):
        k = self.half_width
        if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
            raise TypeError(f"half_width must be an integer, got {k!r}")
        if k < 0:
            raise ValueError(f"half_width must be non-negative, got {k}")
        if k > self.space.half:
            raise ValueError(
                f"half_width {k} exceeds N/2 = {self.space.half} (window does not fit the ladder)"
            )
        object.__setattr__(self, "half_width", int(k))

    @property
    def dimension(self) -> int:
        return 2 * self.half_width + 1

    @property
    def members(self) -> np.ndarray:
        return np.arange(-self.half_width, self.half_width + 1)

    @property
    def ladder_slice(self) -> slice:
        """Positions of the members inside a full-ladder vector."""
        h = self.space.half
        return slice(h - self.half_width, h + self.half_width + 1)


def make_window(space: TwoModeSpace, half_width: int) -> Window:
    return Window(space, half_width)


@dataclass(frozen=True)
class RandomState:
    window: Window
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        z = np.array(self.coefficients, dtype=complex)
        if z.shape != (self.window.dimension,):
            raise ValueError(
                f"expected {self.window.dimension} coefficients, got shape {z.shape}"
            )
        norm = np.vdot(z, z).real
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"coefficients are not normalized (norm^2 = {norm!r})")
        z.setflags(write=False)
        object.__setattr__(self, "coefficients", z)

    @property
    def embedded(self) -> np.ndarray:
        """The state as a vector over the whole (N+1)-dimensional ladder."""
        v = np.zeros(self.window.space.dimension, dtype=complex)
        v[self.window.ladder_slice] = self.coefficients
        return v


@dataclass(frozen=True)
class SamplerConfig:
    master_seed: int = DEFAULT_SEED
    stream_index: int = 0

    def seed_sequence(self, *extra: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index, *extra))


class Sampler:
    """Single-owner random source for one stream.

    Parallel work creates one sampler per stream via :meth:`for_block`; a
    sampler is never shared between threads.
    """

    def __init__(self, config: SamplerConfig | None = None, *, _seq=None):
        self.config = config or SamplerConfig()
        self._rng = np.random.Generator(np.random.PCG64(self.config.seed_sequence() if _seq is None else _seq))

    @classmethod
    def for_block(cls, config: SamplerConfig, block: int) -> "Sampler":
        return cls(config, _seq=config.seed_sequence(block))

    def complex_normal(self, shape) -> np.ndarray:
        re = self._rng.standard_normal(shape)
        im = self._rng.standard_normal(shape)
        return re + 1j * im


def sample_coefficients(window: Window, sampler: Sampler, size: int) -> np.ndarray:
    """``size`` Haar-random unit vectors on the window, shape (size, n)."""
    g = sampler.complex_normal((size, window.dimension))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_state(window: Window, sampler: Sampler) -> RandomState:
    return RandomState(window, sample_coefficients(window, sampler, 1)[0])


@dataclass(frozen=True)
class MomentCheck:
    num_samples: int
    dimension: int
    mean: np.ndarray = field(repr=False)
    covariance: np.ndarray = field(repr=False)
    covariance_stderr: np.ndarray = field(repr=False)
    max_abs_mean: float
    max_cov_deviation: float
    max_cov_zscore: float
    stderr_scale: float


def coefficient_moment_check(
    window: Window, sampler: Sampler, num_samples: int
) -> MomentCheck:
    """Compare empirical first and second coefficient moments with 0 and delta/n."""
    if num_samples < 100:
        raise ValueError(f"num_samples must be at least 100, got {num_samples}")
    n = window.dimension
    z = sample_coefficients(window, sampler, num_samples)
    mean = z.mean(axis=0)
    # pairwise products z_{l1}^* z_{l2}, shape (samples, n, n)
    prod = np.conj(z)[:, :, None] * z[:, None, :]
    cov = prod.mean(axis=0)
    stderr = np.sqrt((np.abs(prod - cov) ** 2).mean(axis=0) / (num_samples - 1))
    target = np.eye(n) / n
    dev = np.abs(cov - target)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_scores = np.where(stderr > 0, dev / stderr, np.where(dev > 0, np.inf, 0.0))
    return MomentCheck(
        num_samples=num_samples,
        dimension=n,
        mean=mean,
        covariance=cov,
        covariance_stderr=stderr,
        max_abs_mean=float(np.abs(mean).max()),
        max_cov_deviation=float(dev.max()),
        max_cov_zscore=float(z_scores.max()),
        stderr_scale=float(1.0 / np.sqrt(num_samples * n)),
    )


def _check_compatible(window: Window, observable: CollectiveObservable):
    if window.space != observable.space:
        raise ValueError(
            f"window lives on N={window.space.total_particles} but observable on "
            f"N={observable.space.total_particles}"
        )


def micro_average(window: Window, observable: CollectiveObservable):
    """``tr(rho_n X)``: mean diagonal entry over the window (exact when possible)."""
    _check_compatible(window, observable)
    diag = observable.diagonal[window.ladder_slice]
    if diag.dtype == object:
        return sum(diag, Fraction(0)) / window.dimension
    return float(diag.mean())
