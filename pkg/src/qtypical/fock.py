"""Two-mode bosonic Fock ladder, oscillator moments and collective observables.

The N-particle sector of two bosonic modes is a ladder of N+1 number states
|l> = |N/2 + l, N/2 - l>, l = -N/2..N/2.  A one-body operator
X = sum_ij m_ij a_i^dag a_j conserves N and is tridiagonal on that ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number, Rational

import numpy as np

__all__ = [
    "CapacityError",
    "TwoModeSpace",
    "Moment",
    "MomentMatrix",
    "CollectiveObservable",
    "DEFAULT_P_MAX",
    "oscillator_moment",
    "moment_matrix",
    "identity_moment",
    "build_observable",
    "apply",
    "squared_band",
    "to_dense",
]

DEFAULT_P_MAX = 64


class CapacityError(ArithmeticError):
    """Raised when an exact computation would exceed its configured size bound."""


@dataclass(frozen=True)
class TwoModeSpace:
    """N bosons shared between two modes; the ladder has N + 1 states."""

    total_particles: int

    def __post_init__(self):
        N = self.total_particles
        if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
            raise TypeError(f"total_particles must be an integer, got {N!r}")
        if N < 0 or N % 2:
            raise ValueError(f"total_particles must be a non-negative even integer, got {N}")
        object.__setattr__(self, "total_particles", int(N))

    @property
    def dimension(self) -> int:
        return self.total_particles + 1

    @property
    def half(self) -> int:
        return self.total_particles // 2

    @property
    def imbalances(self) -> np.ndarray:
        return np.arange(-self.half, self.half + 1)

    def index(self, ell: int) -> int:
        """Position of ladder state ``ell`` in a length-(N+1) vector."""
        if abs(ell) > self.half:
            raise ValueError(f"imbalance {ell} outside ladder [-{self.half}, {self.half}]")
        return ell + self.half

    def occupations(self, ell: int) -> tuple[int, int]:
        self.index(ell)
        return self.half + ell, self.half - ell


@dataclass(frozen=True)
class Moment:
    """An exact moment ``coefficient`` or ``coefficient * sqrt(2)``."""

    coefficient: Fraction
    root2: bool = False

    def __float__(self):
        return float(self.coefficient) * (math.sqrt(2.0) if self.root2 else 1.0)

    @property
    def value(self):
        """Exact Fraction when rational, float otherwise."""
        return float(self) if self.root2 and self.coefficient else self.coefficient

    @property
    def square(self) -> Fraction:
        return self.coefficient**2 * (2 if self.root2 else 1)

    def __eq__(self, other):
        if isinstance(other, Moment):
            if self.coefficient == 0 or other.coefficient == 0:
                return self.coefficient == other.coefficient
            return self.coefficient == other.coefficient and self.root2 == other.root2
        if isinstance(other, Rational):
            if self.root2 and self.coefficient != 0:
                return False
            return self.coefficient == other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Rational):
            return Moment(self.coefficient * other, self.root2)
        return NotImplemented

    __rmul__ = __mul__

    def __hash__(self):
        return hash((self.coefficient, self.root2 and self.coefficient != 0))

    def __str__(self):
        if self.root2 and self.coefficient:
            return f"sqrt(2)*{self.coefficient}"
        return str(self.coefficient)


def _ground_even_moment(two_m: int) -> Fraction:
    # <phi_0| x^(2m) |phi_0> = (2m)! / (4^m m!)
    m = two_m // 2
    return Fraction(math.factorial(two_m), 4**m * math.factorial(m))


def oscillator_moment(i: int, j: int, p: int, *, p_max: int = DEFAULT_P_MAX) -> Moment:
    """Exact ``<phi_i| x^p |phi_j>`` for the two lowest oscillator eigenfunctions.

    Uses phi_1(x) = sqrt(2) x phi_0(x), so every moment reduces to an even
    Gaussian moment of phi_0.  Cross moments with odd ``p`` carry the sqrt(2).
    """
    if i not in (0, 1) or j not in (0, 1):
        raise ValueError(f"mode indices must be 0 or 1, got ({i}, {j})")
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 0:
        raise ValueError(f"power must be a non-negative integer, got {p!r}")
    if p > p_max:
        raise CapacityError(f"power {p} exceeds p_max={p_max}")
    p = int(p)
    if i == j == 0:
        return Moment(_ground_even_moment(p) if p % 2 == 0 else Fraction(0))
    if i == j == 1:
        return Moment(2 * _ground_even_moment(p + 2) if p % 2 == 0 else Fraction(0))
    if p % 2 == 0:
        return Moment(Fraction(0))
    return Moment(_ground_even_moment(p + 1), root2=True)


def _as_real(value, name):
    if isinstance(value, Moment):
        if value.root2 and value.coefficient:
            return float(value)
        return value.coefficient
    if isinstance(value, (bool, np.bool_)):
        raise TypeError(f"{name} must be numeric")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, (complex, np.complexfloating)):
        if value.imag != 0:
            raise ValueError(f"{name} must be real for a Hermitian moment matrix, got {value}")
        return float(value.real)
    if isinstance(value, Number):
        return float(value)
    raise TypeError(f"{name} must be numeric, got {value!r}")


@dataclass(frozen=True)
class MomentMatrix:
    """Hermitian 2x2 single-particle matrix ``m_ij``.

    ``m01`` is stored as given; when ``m01_root2`` is set the actual entry is
    ``m01 * sqrt(2)`` with ``m01`` rational, which keeps ``|m01|^2`` exact.
    ``m10`` is the complex conjugate of ``m01``.
    """

    m00: Number
    m11: Number
    m01: Number = Fraction(0)
    m01_root2: bool = False
    power: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "m00", _as_real(self.m00, "m00"))
        object.__setattr__(self, "m11", _as_real(self.m11, "m11"))
        m01 = self.m01
        if isinstance(m01, Moment):
            object.__setattr__(self, "m01_root2", m01.root2 and m01.coefficient != 0)
            m01 = m01.coefficient
        if self.m01_root2 and not isinstance(m01, Rational):
            raise TypeError("a sqrt(2)-flagged m01 must be rational")
        if isinstance(m01, Rational):
            m01 = Fraction(m01)
        elif isinstance(m01, (complex, np.complexfloating)):
            m01 = complex(m01) if m01.imag else float(m01.real)
        elif isinstance(m01, Number):
            m01 = float(m01)
        else:
            raise TypeError(f"m01 must be numeric, got {m01!r}")
        object.__setattr__(self, "m01", m01)
        if self.m01 == 0:
            object.__setattr__(self, "m01_root2", False)

    @property
    def cross(self):
        """The entry ``<phi_0|x^p|phi_1>`` as a number (float when it carries sqrt(2))."""
        if self.m01_root2:
            return float(self.m01) * math.sqrt(2.0)
        return self.m01

    @property
    def cross_sq(self):
        """``|m01|^2``; exact whenever the stored coefficient is rational."""
        if isinstance(self.m01, Fraction):
            return self.m01**2 * (2 if self.m01_root2 else 1)
        return abs(self.m01) ** 2

    @property
    def is_diagonal(self) -> bool:
        return self.m01 == 0

    @property
    def is_rational(self) -> bool:
        """Diagonal entries and ``|m01|^2`` are all exact rationals."""
        return all(isinstance(v, Fraction) for v in (self.m00, self.m11)) and isinstance(
            self.cross_sq, Fraction
        )

    def entry(self, i: int, j: int):
        if (i, j) == (0, 0):
            return self.m00
        if (i, j) == (1, 1):
            return self.m11
        if (i, j) == (0, 1):
            return self.cross
        if (i, j) == (1, 0):
            c = self.cross
            return c.conjugate() if isinstance(c, complex) else c
        raise ValueError(f"mode indices must be 0 or 1, got ({i}, {j})")

    def as_array(self) -> np.ndarray:
        return np.array(
            [[complex(self.entry(i, j)) for j in (0, 1)] for i in (0, 1)], dtype=complex
        )

    def shifted(self, c) -> "MomentMatrix":
        """Add ``c`` times the identity (each particle contributes ``c``)."""
        return MomentMatrix(self.m00 + c, self.m11 + c, self.m01, self.m01_root2, self.power)


def moment_matrix(p: int, *, p_max: int = DEFAULT_P_MAX) -> MomentMatrix:
    """Exact moment matrix of ``x^p`` between the two oscillator modes."""
    return MomentMatrix(
        oscillator_moment(0, 0, p, p_max=p_max),
        oscillator_moment(1, 1, p, p_max=p_max),
        oscillator_moment(0, 1, p, p_max=p_max),
        power=p,
    )


def identity_moment() -> MomentMatrix:
    """Moment matrix of the identity; its collective observable is the number operator."""
    return MomentMatrix(Fraction(1), Fraction(1), Fraction(0), power=0)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CollectiveObservable:
    """Tridiagonal band of ``X = sum_ij m_ij a_i^dag a_j`` on the N-particle ladder.

    ``coupling[i]`` is ``<l+1|X|l>`` for the ladder pair (i, i+1); the upper
    band is its conjugate.  ``coupling_sq`` holds ``|coupling|^2`` exactly when
    the moment matrix is rational.
    """

    space: TwoModeSpace
    moment: MomentMatrix
    diagonal: np.ndarray = field(repr=False)
    coupling: np.ndarray = field(repr=False)
    coupling_sq: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def is_exact(self) -> bool:
        """All band entries are exact rationals (no coupling, rational diagonal)."""
        return self.moment.is_diagonal and self.diagonal.dtype == object

    @property
    def has_exact_traces(self) -> bool:
        """Traces of X and X^2 over ladder states can be formed exactly."""
        return self.moment.is_rational

    def diagonal_float(self) -> np.ndarray:
        return self.diagonal.astype(float)


def build_observable(space: TwoModeSpace, moment: MomentMatrix) -> CollectiveObservable:
    """Band representation of the collective observable for ``moment`` on ``space``."""
    half = space.half
    ells = range(-half, half + 1)
    if isinstance(moment.m00, Fraction) and isinstance(moment.m11, Fraction):
        diag = np.array(
            [moment.m00 * (half + l) + moment.m11 * (half - l) for l in ells], dtype=object
        )
    else:
        e = space.imbalances
        diag = moment.m00 * (half + e) + moment.m11 * (half - e)
        diag = np.asarray(diag, dtype=float)

    # bosonic factor for l -> l+1: a_0^dag a_1 |n0, n1> = sqrt((n0+1) n1) |n0+1, n1-1>
    lower = np.arange(-half, half)
    bosonic = (half + lower + 1) * (half - lower)
    cross_sq = moment.cross_sq
    if isinstance(cross_sq, Fraction):
        coupling_sq = np.array([cross_sq * int(b) for b in bosonic], dtype=object)
    else:
        coupling_sq = cross_sq * bosonic.astype(float)
    cross = moment.cross
    dtype = complex if isinstance(cross, complex) else float
    coupling = np.asarray(complex(cross) if dtype is complex else float(cross), dtype=dtype)
    coupling = coupling * np.sqrt(bosonic.astype(float))
    return CollectiveObservable(
        space, moment, _readonly(diag), _readonly(coupling), _readonly(coupling_sq)
    )


def apply(observable: CollectiveObservable, vector) -> np.ndarray:
    """Banded product ``X @ vector``; exact for exact vectors and exact observables."""
    v = np.asarray(vector)
    if v.shape[-1] != observable.dimension:
        raise ValueError(
            f"vector length {v.shape[-1]} does not match ladder dimension {observable.dimension}"
        )
    exact = v.dtype == object and observable.is_exact
    diag = observable.diagonal if exact else observable.diagonal_float()
    out = diag * v
    if not observable.moment.is_diagonal:
        c = observable.coupling
        out = out.astype(np.result_type(out, c))
        out[..., 1:] += c * v[..., :-1]
        out[..., :-1] += np.conj(c) * v[..., 1:]
    return out


def squared_band(observable: CollectiveObservable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pentadiagonal band of ``X^2`` as (main, first lower, second lower) diagonals.

    The main diagonal is exact whenever the observable has exact traces.
    """
    d = observable.diagonal
    if not observable.has_exact_traces:
        d = observable.diagonal_float()
    csq = observable.coupling_sq
    main = d * d
    main = main.copy()
    main[:-1] = main[:-1] + csq
    main[1:] = main[1:] + csq
    c = observable.coupling
    df = observable.diagonal_float()
    first = c * (df[:-1] + df[1:])
    second = c[1:] * c[:-1]
    return main, first, second


def to_dense(observable: CollectiveObservable) -> np.ndarray:
    """Dense (N+1)x(N+1) matrix; intended for small ladders only."""
    dim = observable.dimension
    c = observable.coupling
    dense = np.diag(observable.diagonal_float()).astype(np.result_type(float, c))
    idx = np.arange(dim - 1)
    dense[idx + 1, idx] = c
    dense[idx, idx + 1] = np.conj(c)
    return dense
