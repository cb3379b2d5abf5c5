"""Exact Fourier coefficients of f, F and the truncated Mobius inversion of F.

With f(theta) = sum_j cos(2 pi a_j theta) and F = log prod |1 - e(a_j theta)|
= -sum_k f(k theta)/k, the combination

    H(theta) = sum_{d <= r, d squarefree} (mu(d)/d) F(d theta)

splits as -f + G, where G only carries frequencies a_j * l with l > r.
All coefficients here are exponential-basis coefficients at e(t theta), as
exact Fractions. Cutoffs use d <= r and l > r throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInput
from .numtheory import divisors, mobius, mobius_bracket, omega
from .product import FrequencySet

HALF = Fraction(1, 2)


def fhat(S: FrequencySet, t: int) -> Fraction:
    return HALF if abs(t) in S else Fraction(0)


def Fhat(S: FrequencySet, t: int) -> Fraction:
    """-(1/2) sum_{a in S, a | t} a/|t|; zero at t = 0."""
    t = abs(t)
    if t == 0:
        return Fraction(0)
    return -HALF * sum((Fraction(a, t) for a in S if t % a == 0), Fraction(0))


def _check(t: int, r: int) -> None:
    if t < 1:
        raise InvalidInput("t must be a positive integer")
    if r < 1:
        raise InvalidInput("r must be >= 1")


def ghat_exact(S: FrequencySet, t: int, r: int) -> Fraction:
    """Coefficient of G at t: -(1/2) sum_{a | t, t/a > r} (a/t) * bracket(t/a, r)."""
    _check(t, r)
    total = Fraction(0)
    for a in S:
        if t % a == 0 and t // a > r:
            total += Fraction(a, t) * mobius_bracket(t // a, r)
    return -HALF * total


def ghat_bound(S: FrequencySet, t: int, r: int) -> Fraction:
    """(1/2) sum_{a | t, t/a > r} (a/t) 2^omega(t/a), using |bracket(l, r)| <= 2^omega(l)."""
    _check(t, r)
    total = Fraction(0)
    for a in S:
        if t % a == 0 and t // a > r:
            total += Fraction(a, t) * 2 ** omega(t // a)
    return HALF * total


@dataclass(frozen=True)
class MobiusInvertedCoeff:
    t: int
    r: int
    H_hat: Fraction
    f_hat: Fraction
    G_hat: Fraction
    G_hat_bound: Fraction

    def __post_init__(self):
        if self.H_hat != -self.f_hat + self.G_hat:
            raise ArithmeticError("H_hat != -f_hat + G_hat")


def mobius_inverted_coeff(S: FrequencySet, t: int, r: int) -> MobiusInvertedCoeff:
    """H_hat(t) = sum_{d <= r, d | t, squarefree} (mu(d)/d) Fhat(t/d)."""
    _check(t, r)
    H = Fraction(0)
    for d in divisors(t):
        if d > r:
            break
        m = mobius(d)
        if m:
            H += Fraction(m, d) * Fhat(S, t // d)
    f = fhat(S, t)
    return MobiusInvertedCoeff(t=t, r=r, H_hat=H, f_hat=f, G_hat=H + f,
                               G_hat_bound=ghat_bound(S, t, r))


def interval_trend(n: int, r_values) -> list[dict]:
    """For S = {1..n}: max over t in S of |H_hat(t) + 1/2| and of the bound, per r."""
    S = FrequencySet(tuple(range(1, n + 1)))
    rows = []
    for r in r_values:
        worst = Fraction(0)
        worst_bound = Fraction(0)
        ok = True
        for t in S:
            c = mobius_inverted_coeff(S, t, r)
            dev = abs(c.H_hat + HALF)
            ok = ok and dev <= c.G_hat_bound
            worst = max(worst, dev)
            worst_bound = max(worst_bound, c.G_hat_bound)
        rows.append({"r": r, "max_dev": worst, "max_bound": worst_bound, "pointwise_ok": ok})
    return rows


def inverted_sum_values(S: FrequencySet, r: int, theta: np.ndarray) -> np.ndarray:
    """H(theta) = sum_{d <= r squarefree} (mu(d)/d) F_S(d theta) on an array of angles.

    Angles where the product vanishes give -inf entries.
    """
    from .kernels import log_abs_one_minus_array

    theta = np.asarray(theta, dtype=np.float64)
    out = np.zeros_like(theta)
    for d in range(1, r + 1):
        m = mobius(d)
        if not m:
            continue
        Fd = np.zeros_like(theta)
        for a in S:
            Fd += log_abs_one_minus_array(np.mod(theta * (a * d), 1.0))
        out += (m / d) * Fd
    return out



def _midpoint_factor_coeff(b: int, t: int, M: int) -> float:
    """e(t theta) coefficient of log|1 - e(b theta)| by the midpoint rule on M nodes, b | M."""
    theta = (np.arange(M, dtype=np.float64) + 0.5) / M
    x = np.mod(theta * b, 1.0)
    vals = np.log(2.0 * np.sin(np.pi * np.minimum(x, 1.0 - x)))
    return float(np.mean(vals * np.cos(2 * np.pi * t * theta)))


def quadrature_coeff(S: FrequencySet, t: int, r: int, M: int | None = None,
                     richardson: bool = True) -> float:
    """Numerical e(t theta) coefficient of H by the midpoint rule at (m + 1/2)/M.

    Each term F(d theta) factors into log|1 - e(a d theta)|; every factor gets its
    own grid size, a multiple of b = a d and at least max(M, 8 r t N, 256 t), so
    no node hits a zero and the residual (t/M)^3 after extrapolation is tiny. When b does not divide t the discrete projection vanishes by
    periodicity. One Richardson step 2 E(2M) - E(M) removes the leading error.
    """
    _check(t, r)
    floor = max(M or 0, 8 * r * t * S.N, 256 * t)
    total = 0.0
    for d in range(1, r + 1):
        mu = mobius(d)
        if not mu:
            continue
        for a in S:
            b = a * d
            if t % b:
                continue
            Mb = b * max(1, -(-floor // b))
            e1 = _midpoint_factor_coeff(b, t, Mb)
            if richardson:
                e1 = 2 * _midpoint_factor_coeff(b, t, 2 * Mb) - e1
            total += mu / d * e1
    return total
