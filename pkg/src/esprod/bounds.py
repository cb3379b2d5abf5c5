"""Upper and lower bounds on log M(S) and the cosine-minimum quantity.

* ``truncation_upper_bound``: each factor log|1 - e(x)| is dominated by the
  damped partial sum -sum_{j<=J} rho^j cos(2 pi j x)/j plus an explicit
  per-factor error, so the maximum of the summed partial sums bounds log M.
* ``dense_lower_cert``: convexity of exp gives log M(S) >= -(g * mu)(theta)
  for any probability measure mu, where g = sum_{a in S} sum_k cos(2 pi k a .)/k.
  With mu the Fejer kernel of order nR the k-sum is finite and summed exactly.
* ``cosine_min``: min over theta of sum_j cos(2 pi a_j theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _backend
from .errors import InvalidInput, SetNotInRange
from .kernels import (
    MAX_TABLE_ENTRIES,
    GridSpec,
    canonical_angle,
    cos_table,
    cosine_series_on_grid,
    dirichlet_kernel,
    next_pow2,
    reduce_products,
)
from .product import TOP_K, FrequencySet, _top_indices, sup_norm
from .refine import maximize_in_bracket

TRUNCATION_GRID_CAP = 1 << 26

# -- truncation upper bound --------------------------------------------------


@dataclass(frozen=True)
class TruncationParams:
    J: int
    rho: float
    per_factor_error: float

    @classmethod
    def from_J(cls, J: int) -> "TruncationParams":
        if J < 1:
            raise InvalidInput("J must be positive")
        rho = 1.0 - 1.0 / math.sqrt(J)
        # tail of the damped series plus log(2/(1+rho)) <= 1 - rho
        err = rho ** J / (J * (1.0 - rho)) + (1.0 - rho)
        return cls(J=J, rho=rho, per_factor_error=err)

    @property
    def series_tail_bound(self) -> float:
        """Bound on |sum_{j>J} rho^j cos(2 pi j x)/j|."""
        return self.rho ** (self.J + 1) / ((self.J + 1) * (1.0 - self.rho))


def truncated_log_factor(x, params: TruncationParams) -> np.ndarray:
    """h_J(x) = -sum_{j=1}^J rho^j cos(2 pi j x)/j, vectorized over x.

    When the series tail is below 1e-17 the closed form log|1 - rho e(x)| is
    used; otherwise the sum is evaluated directly.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if params.series_tail_bound < 1e-17:
        return 0.5 * np.log1p(params.rho ** 2 - 2.0 * params.rho * np.cos(2 * np.pi * x))
    j = np.arange(1, params.J + 1, dtype=np.float64)
    coef = params.rho ** j / j
    out = np.empty_like(x)
    step = max(1, (1 << 20) // params.J)
    for i in range(0, x.size, step):
        xs = x[i:i + step]
        out[i:i + step] = -(np.cos(2 * np.pi * np.outer(np.mod(xs, 1.0), j)) @ coef)
    return out


def _truncated_derivs(x: np.ndarray, params: TruncationParams) -> tuple[np.ndarray, np.ndarray]:
    # closed-form geometric sums, exact for every J
    rho, J = params.rho, params.J
    w = rho * np.exp(2j * np.pi * x)
    wJ = rho ** J * np.exp(2j * np.pi * np.mod(J * x, 1.0))
    s1 = w * (1 - wJ) / (1 - w)
    s2 = w * (1 - (J + 1) * wJ + J * wJ * w) / (1 - w) ** 2
    return 2 * np.pi * s1.imag, 4 * np.pi ** 2 * s2.real


@dataclass(frozen=True)
class TruncationBound:
    """max_theta sum_k h_J(a_k theta) + n * per_factor_error, with grid provenance."""

    value: float
    params: TruncationParams
    series_max: float
    argmax_theta: float
    grid_size: int
    heuristic: bool

    def __float__(self):
        return self.value


def default_truncation_grid(S: FrequencySet, J: int) -> tuple[int, bool]:
    want = next_pow2(8 * J * S.N)
    if want > TRUNCATION_GRID_CAP:
        return TRUNCATION_GRID_CAP, True
    return want, False


def truncation_upper_bound(S: FrequencySet, J: int, grid: GridSpec | int | None = None,
                           top_k: int = TOP_K, refine_iters: int = 64,
                           cap: int = MAX_TABLE_ENTRIES) -> TruncationBound:
    """Upper bound on log M(S) from the damped truncated log series.

    The summed series is a cosine polynomial of degree J*N; it is sampled on
    the grid by one real FFT of the folded spectrum, then the best grid points
    are refined with closed-form derivatives. The bound is exact up to the
    grid-maximization error, which is why ``heuristic`` is set when the
    default grid had to be capped below 8*J*N points.
    """
    if J < 4:
        raise InvalidInput("J must be >= 4")
    params = TruncationParams.from_J(J)
    if grid is None:
        G, heuristic = default_truncation_grid(S, J)
    else:
        G = grid.size if isinstance(grid, GridSpec) else GridSpec(grid).size
        heuristic = G < 2 * J * S.N
    if G % 2:
        G += 1
    a = S.array
    j = np.arange(1, J + 1, dtype=np.int64)
    freqs = np.outer(a, j).ravel()
    weights = np.tile(-(params.rho ** j.astype(np.float64)) / j, a.size)
    vals = cosine_series_on_grid(freqs, weights, G, cap=cap)
    del freqs, weights

    af = a.astype(np.float64)

    def f(t):
        return float(np.sum(truncated_log_factor(np.mod(af * t, 1.0), params)))

    def df(t):
        return float(np.dot(af, _truncated_derivs(np.mod(af * t, 1.0), params)[0]))

    def d2f(t):
        return float(np.dot(af * af, _truncated_derivs(np.mod(af * t, 1.0), params)[1]))

    top = _top_indices(vals, top_k)
    best_v, best_x = float(vals[top[0]]), top[0] / G
    for g in top:
        g = int(g)
        x, v, _ = maximize_in_bracket(f, df, d2f, (g - 1) / G, g / G, (g + 1) / G,
                                      max_iter=refine_iters)
        if v > best_v:
            best_v, best_x = v, x
    return TruncationBound(
        value=best_v + S.n * params.per_factor_error,
        params=params,
        series_max=best_v,
        argmax_theta=canonical_angle(best_x),
        grid_size=G,
        heuristic=heuristic,
    )


# -- Fejer-convolution lower certificate -------------------------------------


@dataclass(frozen=True)
class DenseLowerCert:
    """Lower bound on log M(S): -(g * F_{nR})(theta0), with an exact term split.

    term_first  = -sum_{a in S} cos(2 pi a theta0)          (k = 1, undamped)
    term_second = +sum_{a in S} (1 - mu(a)) cos(2 pi a theta0) (k = 1 damping)
    term_third  = -sum_{a in S} sum_{k>=2} mu(ak)/k cos(2 pi a k theta0)
    """

    n: int
    R: float
    theta0: float
    value: float
    k_max_used: int
    term_first: float
    term_second: float
    term_third: float
    scanned: bool = False


def _theta0_default(n: int) -> Fraction:
    return Fraction(3, 4 * n)


def _fejer_hat(s: np.ndarray, L: float) -> np.ndarray:
    return np.clip(1.0 - s / L, 0.0, None)


def _check_dense(S: FrequencySet, n: int, R: float) -> None:
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if not R > 1:
        raise InvalidInput("R must exceed 1")
    if S.N > n:
        raise SetNotInRange(f"max(S) = {S.N} exceeds n = {n}")


def _cert_at(S: FrequencySet, n: int, R: float, theta0) -> DenseLowerCert:
    L = n * R
    first, second, third = [], [], []
    k_max = 0
    for aj in S.elements:
        kmax = int(math.floor(L / aj))
        if kmax < 1:
            continue
        k_max = max(k_max, kmax)
        k = np.arange(1, kmax + 1, dtype=np.int64)
        cosv = np.cos(2 * np.pi * reduce_products(aj * k, theta0))
        mu = _fejer_hat((aj * k).astype(np.float64), L)
        first.append(-cosv[0])
        second.append((1.0 - mu[0]) * cosv[0])
        if kmax > 1:
            third.append(-float(np.sum(mu[1:] / k[1:] * cosv[1:])))
    t1, t2, t3 = math.fsum(first), math.fsum(second), math.fsum(third)
    value = math.fsum(first + second + third)
    return DenseLowerCert(n=n, R=R, theta0=canonical_angle(theta0), value=value,
                          k_max_used=k_max, term_first=t1, term_second=t2, term_third=t3)


def merged_coefficients(S: FrequencySet, n: int, R: float) -> np.ndarray:
    """W[s] = mu_hat(s) * sum_{a in S, a | s} a/s for s = 0..floor(nR)."""
    L = n * R
    smax = int(math.floor(L))
    idx, wts = [], []
    for aj in S.elements:
        kmax = smax // aj
        if kmax:
            k = np.arange(1, kmax + 1, dtype=np.int64)
            idx.append(aj * k)
            wts.append(1.0 / k)
    if not idx:
        return np.zeros(smax + 1)
    W = np.bincount(np.concatenate(idx), weights=np.concatenate(wts), minlength=smax + 1)
    return W * _fejer_hat(np.arange(smax + 1, dtype=np.float64), L)


def dense_lower_cert_merged(S: FrequencySet, n: int, R: float, theta0=None) -> float:
    """Same certificate summed over s = a*k first (independent summation order)."""
    _check_dense(S, n, R)
    theta0 = _theta0_default(n) if theta0 is None else theta0
    W = merged_coefficients(S, n, R)
    s = np.arange(W.size, dtype=np.int64)
    return -math.fsum(W * np.cos(2 * np.pi * reduce_products(s, theta0)))


def dense_lower_cert(S: FrequencySet, n: int, R: float, theta0=None,
                     scan: bool = False) -> DenseLowerCert:
    """Exact Fejer-convolution lower bound on log M(S) for S within {1..n}.

    theta0 defaults to 3/(4n). With ``scan`` the 8n points i/(8n) are tried
    and the best certificate returned.
    """
    _check_dense(S, n, R)
    if not scan:
        return _cert_at(S, n, R, _theta0_default(n) if theta0 is None else theta0)
    W = merged_coefficients(S, n, R)
    G = 8 * n
    curve = cosine_series_on_grid(np.arange(W.size), -W, G)
    m = int(np.argmax(curve))
    cert = _cert_at(S, n, R, Fraction(m, G))
    default = _cert_at(S, n, R, _theta0_default(n))
    best = cert if cert.value >= default.value else default
    return DenseLowerCert(**{**best.__dict__, "scanned": True})


def dense_bound_terms(n: int, R: float, k0: int,
                      S: Optional[FrequencySet] = None) -> tuple[float, float, float]:
    """The three lower-bound terms for S = {1..n} at theta0 = 3/(4n).

    first:  1/2 - D_n(3 pi / 2n) / 2  (k = 1 Dirichlet term)
    second: -(n + 1) / (2R)           (k = 1 damping)
    third:  -sum_{k=2}^{k0} (1/k) |sum_{j<=n} (1 - jk/nR)_+ cos(3 pi k j / 2n)|
    """
    if S is not None and S.elements != tuple(range(1, n + 1)):
        raise InvalidInput("dense_bound_terms is defined for S = {1..n} only")
    if k0 < 2:
        raise InvalidInput("k0 must be >= 2")
    if not R > 1:
        raise InvalidInput("R must exceed 1")
    first = 0.5 - 0.5 * dirichlet_kernel(n, 3 * math.pi / (2 * n))
    second = -(n + 1) / (2 * R)
    L = n * R
    j = np.arange(1, n + 1, dtype=np.int64)
    th = _theta0_default(n)
    third = 0.0
    for k in range(2, k0 + 1):
        inner = np.sum(_fejer_hat((j * k).astype(np.float64), L)
                       * np.cos(2 * np.pi * reduce_products(j * k, th)))
        third -= abs(float(inner)) / k
    return first, second, third


# -- cosine minimum ----------------------------------------------------------


@dataclass(frozen=True)
class CosineMinResult:
    min_value: float
    argmin_theta: float
    grid_size: int = 0

    @property
    def negated(self) -> float:
        return -self.min_value


def cosine_min(S: FrequencySet, grid: GridSpec | int | None = None, top_k: int = TOP_K,
               refine_iters: int = 64, threads: Optional[int] = None) -> CosineMinResult:
    """min_theta sum_j cos(2 pi a_j theta) by half-circle grid scan and refinement."""
    if grid is None:
        G = next_pow2(max(64, 16 * S.N))
    else:
        G = grid.size if isinstance(grid, GridSpec) else GridSpec(grid).size
    a = S.array
    af = a.astype(np.float64)
    table = cos_table(G)
    vals = _backend.lookup_sum(np.ascontiguousarray(a % G), table, 0, G // 2 + 1,
                               threads or _backend.default_threads())

    def g(t):
        return -float(np.sum(np.cos(2 * np.pi * reduce_products(a, t))))

    def dg(t):
        return float(2 * np.pi * np.dot(af, np.sin(2 * np.pi * reduce_products(a, t))))

    def d2g(t):
        return float(4 * np.pi ** 2 * np.dot(af * af, np.cos(2 * np.pi * reduce_products(a, t))))

    top = _top_indices(-vals, top_k)
    best_v, best_x = -math.inf, 0.0
    for gi in top:
        gi = int(gi)
        x, v, _ = maximize_in_bracket(g, dg, d2g, (gi - 1) / G, gi / G, (gi + 1) / G,
                                      max_iter=refine_iters)
        x = canonical_angle(x)
        if v > best_v or (v == best_v and x < best_x):
            best_v, best_x = v, x
    return CosineMinResult(min_value=-best_v, argmin_theta=best_x, grid_size=G)


def relation_diag(S: FrequencySet, log_M: Optional[float] = None) -> dict:
    """Report log M(S) next to (-min cos sum) * log n; no inequality is implied."""
    if log_M is None:
        log_M = sup_norm(S).log_max_found
    cm = cosine_min(S)
    return {
        "n": S.n,
        "log_M": log_M,
        "neg_cos_min": cm.negated,
        "neg_cos_min_times_log_n": cm.negated * math.log(max(S.n, 2)),
    }
