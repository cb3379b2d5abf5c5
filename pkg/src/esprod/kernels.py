"""Elementary functions and kernels on the circle R/Z.

Angles are real numbers taken modulo 1, standing for z = e(theta) = exp(2 pi i theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AllocationCap, InvalidInput, SingularPoint

#: distances to an integer at or below this are treated as exact zeros
SINGULAR_EPS = 2.0 ** -52

#: largest number of table/grid entries any module may allocate
MAX_TABLE_ENTRIES = 1 << 27


def canonical_angle(theta) -> float:
    """Reduce theta to its representative in [0, 1)."""
    if isinstance(theta, (int, Fraction)):
        return float(Fraction(theta) % 1)
    t = float(theta) % 1.0
    return 0.0 if t == 1.0 else t


def reduce_products(a, theta) -> np.ndarray:
    """Fractional parts of a_j * theta, exact when theta is rational."""
    a = np.asarray(a, dtype=np.int64)
    if isinstance(theta, (int, Fraction)):
        q = Fraction(theta) % 1
        num, den = q.numerator, q.denominator
        if den < (1 << 62) // max(1, int(a.max(initial=1))):
            r = (a * num) % den
            return r / den
        return np.array([float((int(x) * q) % 1) for x in a])
    x = np.mod(a * float(theta), 1.0)
    x[x == 1.0] = 0.0
    return x


@dataclass(frozen=True)
class GridSpec:
    """Equispaced sample points k/size, k = 0..size-1."""

    size: int
    oversample: Fraction = Fraction(16)

    def __post_init__(self):
        if int(self.size) < 2:
            raise InvalidInput(f"grid size must be >= 2, got {self.size}")
        object.__setattr__(self, "size", int(self.size))

    def check_cap(self, cap: int = MAX_TABLE_ENTRIES) -> None:
        if self.size > cap:
            raise AllocationCap(f"grid of {self.size} points exceeds cap {cap}")


def next_pow2(x: float) -> int:
    x = max(2, int(math.ceil(x)))
    return 1 << (x - 1).bit_length()


def _log_abs_one_minus_unchecked(x: np.ndarray) -> np.ndarray:
    # x already in [0, 1); fold to [0, 1/2] so both halves share one code path.
    x = np.minimum(x, 1.0 - x)
    with np.errstate(divide="ignore"):
        return np.log(2.0 * np.sin(np.pi * x))


def log_abs_one_minus(theta) -> float:
    """log|1 - e(theta)|, computed as log(2|sin(pi theta)|)."""
    x = canonical_angle(theta)
    if min(x, 1.0 - x) <= SINGULAR_EPS:
        raise SingularPoint(f"1 - e(theta) vanishes at theta = {theta!r}")
    return float(_log_abs_one_minus_unchecked(np.array([x]))[0])


def log_abs_one_minus_array(x) -> np.ndarray:
    """Vectorized log|1 - e(x)|; singular entries become -inf rather than raising."""
    x = np.mod(np.asarray(x, dtype=np.float64), 1.0)
    x[x == 1.0] = 0.0
    out = _log_abs_one_minus_unchecked(x)
    out[np.minimum(x, 1.0 - x) <= SINGULAR_EPS] = -np.inf
    return out


def fejer_kernel(n: int, theta) -> float:
    """Fejer kernel F_n(theta) = sum_{|j|<n} (1 - |j|/n) e(j theta).

    Uses the closed form sin^2(n pi theta) / (n sin^2(pi theta)), which is
    nonnegative by construction.
    """
    if n < 1:
        raise InvalidInput("Fejer kernel order must be >= 1")
    x = canonical_angle(theta)
    s = math.sin(math.pi * x)
    if abs(s) < 1e-9:
        j = np.arange(1, n)
        return float(1.0 + 2.0 * np.sum((1.0 - j / n) * np.cos(2 * np.pi * j * x)))
    return math.sin(n * math.pi * x) ** 2 / (n * s * s)


def dirichlet_kernel(n: int, x: float) -> float:
    """Dirichlet kernel D_n(x) = sin((n + 1/2) x) / sin(x / 2), x in radians."""
    x = math.fmod(float(x), 2.0 * math.pi)
    s = math.sin(x / 2.0)
    if abs(s) < 1e-8:
        # removable singularity; sum form is exact here
        j = np.arange(1, n + 1)
        return float(1.0 + 2.0 * np.sum(np.cos(j * x)))
    return math.sin((n + 0.5) * x) / s


def log_table(grid: GridSpec | int, cap: int = MAX_TABLE_ENTRIES) -> np.ndarray:
    """T[m] = log|1 - e(m/G)| for m = 1..G-1, with T[0] = -inf as the sentinel.

    A grid point where any a_j * g is divisible by G therefore sums to -inf
    and never wins a maximum.
    """
    if not isinstance(grid, GridSpec):
        grid = GridSpec(grid)
    grid.check_cap(cap)
    G = grid.size
    m = np.arange(G, dtype=np.float64)
    t = _log_abs_one_minus_unchecked(m / G)
    t[0] = -np.inf
    return t


def cos_table(grid: GridSpec | int, cap: int = MAX_TABLE_ENTRIES) -> np.ndarray:
    """C[m] = cos(2 pi m / G)."""
    if not isinstance(grid, GridSpec):
        grid = GridSpec(grid)
    grid.check_cap(cap)
    G = grid.size
    return np.cos(2.0 * np.pi * np.arange(G, dtype=np.float64) / G)


def cosine_series_on_grid(freqs, weights, G: int,
                          cap: int = MAX_TABLE_ENTRIES) -> np.ndarray:
    """Evaluate sum_f w_f cos(2 pi f m / G) at m = 0..G//2 by one real FFT.

    Frequencies are folded modulo G, which is exact on the grid.
    """
    if G > cap:
        raise AllocationCap(f"grid of {G} points exceeds cap {cap}")
    if G % 2:
        raise InvalidInput("cosine_series_on_grid needs an even grid size")
    f = np.mod(np.asarray(freqs, dtype=np.int64), G)
    f = np.minimum(f, G - f)
    half = G // 2
    w = np.bincount(f, weights=np.asarray(weights, dtype=np.float64), minlength=half + 1)
    spectrum = w * (G / 2.0)
    spectrum[0] = w[0] * G
    spectrum[half] = w[half] * G
    vals = np.fft.irfft(spectrum.astype(np.complex128), n=G)
    return vals[: half + 1]
