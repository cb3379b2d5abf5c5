"""The product prod_j |1 - z^{a_j}| on |z| = 1 and its maximum M(S).

F_S(theta) = sum_j log|1 - e(a_j theta)| is evaluated in log space. The
maximum is estimated by a grid scan plus local refinement (``sup_norm``), or
bracketed rigorously from the exact integer coefficients (``certified_sup``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import _backend
from .errors import DegreeCap, GapNotReached, InvalidInput, SingularPoint
from .kernels import (
    MAX_TABLE_ENTRIES,
    SINGULAR_EPS,
    GridSpec,
    canonical_angle,
    log_table,
    next_pow2,
    reduce_products,
)
from .refine import maximize_in_bracket

DEFAULT_DEGREE_CAP = 100_000
TOP_K = 16


@dataclass(frozen=True)
class FrequencySet:
    """Strictly increasing positive integers a_1 < ... < a_n."""

    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(int(x) for x in self.elements)
        if not els:
            raise InvalidInput("frequency set must be non-empty")
        if els[0] < 1:
            raise InvalidInput(f"elements must be positive, got {els[0]}")
        for x, y in zip(els, els[1:]):
            if y <= x:
                raise InvalidInput(f"elements must be strictly increasing ({x} then {y})")
        object.__setattr__(self, "elements", els)

    @classmethod
    def of(cls, values: Iterable[int]) -> "FrequencySet":
        """Build from any iterable, sorting and validating distinctness."""
        vals = [int(v) for v in values]
        if len(set(vals)) != len(vals):
            raise InvalidInput("elements must be distinct")
        return cls(tuple(sorted(vals)))

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def N(self) -> int:
        return self.elements[-1]

    @property
    def total(self) -> int:
        return sum(self.elements)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.elements, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._members

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.elements)


# -- set file format ---------------------------------------------------------

def parse_set_text(text: str) -> FrequencySet:
    """One positive integer per line, strictly increasing; ``#`` comments and blank lines skipped.

    A line may also hold several integers separated by commas or whitespace.
    """
    values = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        for tok in line.replace(",", " ").split():
            try:
                v = int(tok)
            except ValueError:
                raise InvalidInput(f"line {lineno}: not an integer: {tok!r}") from None
            if v < 1:
                raise InvalidInput(f"line {lineno}: element must be positive, got {v}")
            if values and v <= values[-1]:
                raise InvalidInput(f"line {lineno}: {v} does not exceed previous {values[-1]}")
            values.append(v)
    if not values:
        raise InvalidInput("set file contains no elements")
    return FrequencySet(tuple(values))


def read_set_file(path) -> FrequencySet:
    try:
        text = Path(path).read_text(encoding="ascii")
    except (UnicodeDecodeError, OSError) as exc:
        raise InvalidInput(f"cannot read set file {path}: {exc}") from None
    return parse_set_text(text)


def format_set(S: FrequencySet, header: Optional[str] = None) -> str:
    lines = []
    if header:
        lines.extend("# " + h for h in header.splitlines())
    lines.extend(str(a) for a in S.elements)
    return "\n".join(lines) + "\n"


def write_set_file(path, S: FrequencySet, header: Optional[str] = None) -> None:
    Path(path).write_text(format_set(S, header), encoding="ascii")


# -- log-space evaluation ----------------------------------------------------

def _fold(x: np.ndarray) -> np.ndarray:
    return np.minimum(x, 1.0 - x)


def eval_F(S: FrequencySet, theta) -> float:
    """F_S(theta) = log prod_j |1 - e(a_j theta)|.

    Raises SingularPoint when some a_j * theta is an integer to machine resolution.
    """
    x = reduce_products(S.array, theta)
    if np.any(_fold(x) <= SINGULAR_EPS):
        raise SingularPoint(f"product vanishes at theta = {theta!r}")
    return float(np.sum(np.log(2.0 * np.sin(np.pi * _fold(x)))))


def _F_or_ninf(a: np.ndarray, theta: float) -> float:
    x = reduce_products(a, theta)
    if np.any(_fold(x) <= SINGULAR_EPS):
        return -math.inf
    return float(np.sum(np.log(2.0 * np.sin(np.pi * _fold(x)))))


def _dF(a: np.ndarray, theta: float) -> float:
    x = reduce_products(a, theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(math.pi * np.sum(a / np.tan(np.pi * x)))


def _d2F(a: np.ndarray, theta: float) -> float:
    x = reduce_products(a, theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sin(np.pi * x)
        return float(-(math.pi ** 2) * np.sum((a / s) ** 2))


# -- estimates ---------------------------------------------------------------

@dataclass(frozen=True)
class SupNormEstimate:
    """Best value of F_S found (a lower estimate of log M) and an optional certified upper end."""

    log_max_found: float
    argmax_theta: float
    grid_size: int
    refinement_steps: int
    method: str
    n: int
    certified_log_upper: Optional[float] = None
    gap_reached: Optional[bool] = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.certified_log_upper is not None and self.log_max_found > self.certified_log_upper:
            raise ArithmeticError("estimate exceeds its certified upper bound")

    @property
    def value(self) -> float:
        """exp(log_max_found)."""
        return math.exp(self.log_max_found)

    @property
    def upper(self) -> Optional[float]:
        if self.certified_log_upper is None:
            return None
        return math.exp(self.certified_log_upper)

    @property
    def gap(self) -> Optional[float]:
        if self.certified_log_upper is None:
            return None
        return self.certified_log_upper - self.log_max_found


def default_grid_size(S: FrequencySet) -> int:
    """Next power of two >= 16 N ceil(sqrt(n))."""
    return next_pow2(16 * S.N * (math.isqrt(S.n - 1) + 1))


def _top_indices(vals: np.ndarray, k: int) -> np.ndarray:
    finite = np.flatnonzero(np.isfinite(vals))
    if finite.size == 0:
        return finite
    k = min(k, finite.size)
    sub = vals[finite]
    part = np.argpartition(-sub, k - 1)[:k]
    cand = finite[part]
    order = np.lexsort((cand, -vals[cand]))
    return cand[order]


def _refine_candidates(a: np.ndarray, grid_idx: np.ndarray, G: int,
                       refine_iters: int) -> tuple[float, float, int]:
    f = lambda t: _F_or_ninf(a, t)
    df = lambda t: _dF(a, t)
    d2f = lambda t: _d2F(a, t)
    best = (-math.inf, 0.0, 0)
    for g in grid_idx:
        g = int(g)
        x, v, it = maximize_in_bracket(f, df, d2f, (g - 1) / G, g / G, (g + 1) / G,
                                       max_iter=refine_iters)
        x = canonical_angle(x)
        if v > best[0] or (v == best[0] and x < best[1]):
            best = (v, x, it)
    return best


def sup_norm(S: FrequencySet, grid: GridSpec | int | None = None, refine_iters: int = 64,
             top_k: int = TOP_K, threads: Optional[int] = None,
             cap: int = MAX_TABLE_ENTRIES) -> SupNormEstimate:
    """Estimate log M(S) by scanning theta = g/G, g in [0, G/2], then refining the top_k points.

    F_S is even, so the half circle suffices. The returned value is F_S at an
    actual point and hence never exceeds log M(S) beyond rounding.
    """
    if grid is None:
        G = default_grid_size(S)
    else:
        G = grid.size if isinstance(grid, GridSpec) else GridSpec(grid).size
    threads = threads or _backend.default_threads()
    a = S.array
    while True:
        table = log_table(G, cap=cap)
        vals = _backend.lookup_sum(np.ascontiguousarray(a % G), table, 0, G // 2 + 1, threads)
        top = _top_indices(vals, top_k)
        if top.size:
            break
        G *= 2  # every grid point is a zero of the product
    v, x, it = _refine_candidates(a, top, G, refine_iters)
    return SupNormEstimate(
        log_max_found=v,
        argmax_theta=x,
        grid_size=G,
        refinement_steps=it,
        method="grid_refine",
        n=S.n,
        extra={"grid_log_max": float(vals[top[0]]), "backend": _backend.NAME},
    )


# -- exact coefficients ------------------------------------------------------

@dataclass(frozen=True)
class CoefficientVector:
    """Exact integer coefficients c_0..c_A of prod_j (1 - z^{a_j})."""

    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @cached_property
    def weighted_l1(self) -> int:
        """sum_k k |c_k|, a bound on |P'(z)| for |z| = 1."""
        return sum(k * abs(c) for k, c in enumerate(self.coefficients))

    @cached_property
    def l1(self) -> int:
        return sum(abs(c) for c in self.coefficients)

    def as_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.coefficients], dtype=np.float64)


def exact_coefficients(S: FrequencySet, cap: int = DEFAULT_DEGREE_CAP) -> CoefficientVector:
    """Expand prod (1 - z^{a_j}) by repeated c <- c - shift(c, a_j).

    int64 is used while the L1 bound 2^i is safely representable, then the
    array switches to Python integers.
    """
    A = S.total
    if A > cap:
        raise DegreeCap(f"degree {A} exceeds cap {cap}")
    c = np.zeros(A + 1, dtype=np.int64)
    c[0] = 1
    deg = 0
    for i, aj in enumerate(S.elements):
        if i >= 61 and c.dtype != object:
            c = c.astype(object)
        shifted = c[: deg + 1].copy()
        c[aj: aj + deg + 1] -= shifted
        deg += aj
    return CoefficientVector(tuple(int(x) for x in c))


def _eval_poly_float(cv: CoefficientVector, theta) -> complex:
    k = np.arange(cv.degree + 1, dtype=np.int64)
    x = reduce_products(k, theta) if cv.degree > 0 else np.zeros(1)
    c = cv.as_float()
    return complex(np.dot(c, np.cos(2 * np.pi * x)), np.dot(c, np.sin(2 * np.pi * x)))


def _float_error_bound(cv: CoefficientVector) -> float:
    # phase errors eps * 2 pi k per term plus accumulated rounding in the dot products
    eps = np.finfo(np.float64).eps
    return 8.0 * eps * (math.pi * float(cv.weighted_l1) + (cv.degree + 2) * float(cv.l1))


def _eval_poly_fixed(cv: CoefficientVector, theta, bits: int) -> tuple[int, int]:
    """Horner's rule in B-bit fixed point; returns (Re, Im) scaled by 2^B.

    e(theta) comes from mpmath at B + 16 bits. The absolute error is at most
    about (degree + 2) * l1 * 2^-B.
    """
    import mpmath

    t = Fraction(theta)
    t -= math.floor(t)
    with mpmath.workprec(bits + 16):
        ang = 2 * mpmath.pi * mpmath.mpf(t.numerator) / t.denominator
        X = int(mpmath.nint(mpmath.ldexp(mpmath.cos(ang), bits)))
        Y = int(mpmath.nint(mpmath.ldexp(mpmath.sin(ang), bits)))
    re, im = 0, 0
    for c in reversed(cv.coefficients):
        re, im = ((re * X - im * Y) >> bits) + (c << bits), (re * Y + im * X) >> bits
    return re, im


def eval_poly(cv: CoefficientVector, theta, rel_tol: float = 1e-12) -> complex:
    """P(e(theta)) from exact coefficients.

    Float evaluation (with exact phase reduction for rational theta) is used
    when its error bound is below rel_tol |P|. Otherwise Horner's rule runs in
    fixed point, doubling the working bits until the error bound is below
    rel_tol |P|; the coefficients can exceed |P| by many orders of magnitude.
    """
    z = _eval_poly_float(cv, theta)
    if _float_error_bound(cv) <= rel_tol * abs(z):
        return z
    slack = (4 * (cv.degree + 2) * cv.l1).bit_length()
    bits = 64 + slack
    while True:
        re, im = _eval_poly_fixed(cv, theta, bits)
        # |P| 2^B ~ max(|re|, |im|); error ~ 2^slack
        mag = max(abs(re), abs(im)).bit_length()
        if mag - slack >= math.log2(1 / rel_tol) + 2 or bits >= 1 << 15:
            d = 1 << bits
            return complex(float(Fraction(re, d)), float(Fraction(im, d)))
        bits *= 2


def _fft_error_bound(c: np.ndarray, G: int) -> float:
    eps = np.finfo(np.float64).eps
    l2 = float(np.sqrt(np.dot(c, c)))
    l1 = float(np.sum(np.abs(c)))
    return 5.0 * eps * math.log2(G) * math.sqrt(G) * l2 + 2.0 * eps * l1


def certified_sup(S: FrequencySet, target_gap: float = 1e-6, max_grid: int = 1 << 24,
                  refine_iters: int = 64, top_k: int = TOP_K,
                  degree_cap: int = DEFAULT_DEGREE_CAP, strict: bool = True) -> SupNormEstimate:
    """Bracket log M(S) using exact coefficients.

    |P| is sampled on a grid of size G by FFT. Every point of the circle is
    within pi/G of a grid point and |P'| <= sum_k k|c_k| there, so
    log(max_grid|P| + fft_error + (pi/G) sum_k k|c_k|) bounds log M(S) from
    above. Bernstein's inequality |P'| <= A max|P| gives the second bound
    max_grid|P| / (1 - pi A / G). Since |P|^2 is a real trigonometric
    polynomial of degree A with zero derivative at its maximum, Bernstein on
    its second derivative also gives max|P|^2 <= max_grid|P|^2 / (1 - (pi A / G)^2 / 2).
    The smallest of the three is used. The
    lower end is F_S at the best refined grid point. G grows until the gap is
    at most ``target_gap``, ``max_grid`` is reached, or the target is below the
    FFT error floor; then GapNotReached carries the best bracket (or it is
    returned when strict is False).
    """
    cv = exact_coefficients(S, cap=degree_cap)
    c = cv.as_float()
    lip = float(cv.weighted_l1) * (1.0 + 1e-15)
    A = cv.degree
    a = S.array
    G = next_pow2(max(4 * (A + 1), 64))
    while True:
        vals = np.abs(np.fft.rfft(c, n=G))
        err = _fft_error_bound(c, G)
        top = _top_indices(np.where(vals > err, vals, -np.inf), top_k)
        if top.size == 0:
            lower, x, it = -math.inf, 0.0, 0
        else:
            lower, x, it = _refine_candidates(a, top, G, refine_iters)
        grid_max = float(vals.max()) + err
        upper_lin = grid_max + math.pi * lip / G
        # Bernstein |P'| <= A max|P| gives max|P| <= grid_max / (1 - pi A / G)
        h = math.pi * A / G
        if h < 1:
            upper_lin = min(upper_lin, grid_max / (1.0 - h))
        upper = math.log(upper_lin)
        # T = |P|^2 has degree A and T' = 0 at its maximum, so with |T''| <= A^2 max T
        # and a grid point within pi/G: max T <= T_grid / (1 - h^2 / 2)
        if h * h < 2:
            upper = min(upper, math.log(grid_max) - 0.5 * math.log1p(-0.5 * h * h))
        upper += 4e-16 * abs(upper) + 1e-15
        lower = min(lower, upper)
        gap = upper - lower
        reached = gap <= target_gap
        if reached or G >= max_grid:
            break
        slack = math.exp(lower) * math.expm1(target_gap) - err
        if slack <= 0:
            break
        need = min(math.pi * lip / slack, math.pi * A / -math.expm1(-target_gap),
                   math.pi * A / math.sqrt(-2.0 * math.expm1(-2.0 * target_gap)))
        G = min(max_grid, max(2 * G, next_pow2(need * 1.05)))
    est = SupNormEstimate(
        log_max_found=lower,
        argmax_theta=x,
        grid_size=G,
        refinement_steps=it,
        method="exact_coeff",
        n=S.n,
        certified_log_upper=upper,
        gap_reached=reached,
        extra={"degree": cv.degree, "weighted_l1": cv.weighted_l1, "fft_error": err},
    )
    if not reached and strict:
        raise GapNotReached(f"gap {gap:.3g} > target {target_gap:.3g} at grid {G}", est)
    return est
