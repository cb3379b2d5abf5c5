"""Mobius function, omega, truncated Mobius brackets and smooth-number counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AllocationCap, InvalidInput

DEFAULT_SIEVE_LIMIT = 10 ** 7
ENUMERATION_CAP = 10 ** 8


@dataclass(frozen=True)
class FactorSieve:
    """Smallest-prime-factor table spf[k] for 2 <= k <= limit (spf[0] = spf[1] = 0)."""

    limit: int
    spf: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "FactorSieve":
        limit = max(int(limit), 2)
        if limit > DEFAULT_SIEVE_LIMIT * 10:
            raise AllocationCap(f"sieve limit {limit} too large")
        spf = np.zeros(limit + 1, dtype=np.int32)
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == 0:
                block = spf[p * p::p]
                block[block == 0] = p
        rest = np.flatnonzero(spf == 0)
        spf[rest] = rest
        spf[:2] = 0
        spf.setflags(write=False)
        return cls(limit=limit, spf=spf)

    @property
    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return idx[(self.spf == idx) & (idx >= 2)]

    def factor(self, n: int) -> dict[int, int]:
        """Prime factorization; trial division by sieve primes above the table limit."""
        if n < 1:
            raise InvalidInput("factor() needs n >= 1")
        out: dict[int, int] = {}
        if n > self.limit:
            for p in self.primes:
                p = int(p)
                if p * p > n:
                    break
                while n % p == 0:
                    out[p] = out.get(p, 0) + 1
                    n //= p
            if n > self.limit:
                if n > self.limit ** 2:
                    raise AllocationCap(f"cannot certify factorization beyond {self.limit ** 2}")
                out[n] = out.get(n, 0) + 1
                return out
        while n > 1:
            p = int(self.spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return out


_SIEVE: FactorSieve | None = None


def get_sieve(limit: int = 1 << 16) -> FactorSieve:
    """Shared sieve, grown on demand (read-only once built)."""
    global _SIEVE
    if _SIEVE is None or _SIEVE.limit < limit:
        size = max(limit, 2 * (_SIEVE.limit if _SIEVE else 0), 1 << 16)
        _SIEVE = FactorSieve.build(min(size, max(limit, DEFAULT_SIEVE_LIMIT)))
    return _SIEVE


def _factor(n: int) -> dict[int, int]:
    s = get_sieve(min(n, DEFAULT_SIEVE_LIMIT))
    return s.factor(n)


def mobius(d: int) -> int:
    if d < 1:
        raise InvalidInput("mobius needs d >= 1")
    f = _factor(d)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def omega(l: int) -> int:
    """Number of distinct prime factors."""
    if l < 1:
        raise InvalidInput("omega needs l >= 1")
    return len(_factor(l))


def is_squarefree(d: int) -> bool:
    return mobius(d) != 0


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in _factor(n).items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mobius_bracket(l: int, r: int) -> int:
    """sum_{d | l, d <= r, d squarefree} mu(d)."""
    if l < 1 or r < 1:
        raise InvalidInput("mobius_bracket needs l, r >= 1")
    total = 0
    # squarefree divisors are products of distinct primes
    sq = [1]
    for p in _factor(l):
        sq += [d * p for d in sq]
    for d in sq:
        if d <= r:
            total += mobius(d)
    return total


def mobius_table(limit: int) -> np.ndarray:
    """mu(k) for k = 0..limit (mu(0) = 0)."""
    spf = get_sieve(limit).spf[: limit + 1].astype(np.int64)
    mu = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        mu[1] = 1
    for k in range(2, limit + 1):
        p = spf[k]
        q = k // p
        mu[k] = 0 if q % p == 0 else -mu[q]
    return mu


def divisors_in_set(t: int, S) -> list[int]:
    """Ascending elements of S dividing t."""
    if t < 1:
        raise InvalidInput("t must be >= 1")
    if len(S) > 64:
        members = set(S)
        return [d for d in divisors(t) if d in members]
    return [a for a in S if t % a == 0]


# -- smooth numbers ----------------------------------------------------------

def _primes_upto(y: int) -> list[int]:
    return [int(p) for p in get_sieve(max(y, 2)).primes if p <= y]


def psi_enumerate(x: int, y: int) -> int:
    """psi(x, y) by the recursion psi(x, p_i) = psi(x, p_{i-1}) + psi(x/p_i, p_i)."""
    if x < 1:
        return 0
    primes = _primes_upto(y)

    @lru_cache(maxsize=None)
    def count(xx: int, i: int) -> int:
        # numbers <= xx built from primes[0..i]
        if i < 0 or xx < 2:
            return 1
        if i == 0:
            return xx.bit_length()  # powers of two up to xx
        p = primes[i]
        total = count(xx, i - 1)
        while xx >= p:
            xx //= p
            total += count(xx, i - 1)
        return total

    if not primes:
        return 1
    # primes above xx never contribute
    hi = len(primes) - 1
    while hi >= 0 and primes[hi] > x:
        hi -= 1
    return count(x, hi)


def psi_sieve(x: int, y: int) -> int:
    """psi(x, y) by striking out multiples of every prime in (y, x]."""
    if x < 2:
        return max(0, x)
    smooth = np.ones(x + 1, dtype=bool)
    smooth[0] = False
    for p in get_sieve(x).primes:
        if p > x:
            break
        if p > y:
            smooth[p::p] = False
    return int(np.count_nonzero(smooth))


def psi_smooth(x: int, y: int, sieve_limit: int = DEFAULT_SIEVE_LIMIT) -> int:
    """Count of n <= x having no prime factor above y."""
    if x < 1 or y < 2:
        raise InvalidInput("psi_smooth needs x >= 1, y >= 2")
    if y >= x:
        return x
    if x <= sieve_limit:
        return psi_sieve(x, y)
    if x > ENUMERATION_CAP:
        raise AllocationCap(f"x = {x} exceeds enumeration cap {ENUMERATION_CAP}")
    return psi_enumerate(x, y)
