import math

import numpy as np
import pytest

from esprod.errors import AllocationCap, InvalidInput
from esprod.numtheory import (
    FactorSieve,
    divisors,
    divisors_in_set,
    is_squarefree,
    mobius,
    mobius_bracket,
    mobius_table,
    omega,
    psi_enumerate,
    psi_sieve,
    psi_smooth,
)


def factor_trial(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def psi_brute(x, y):
    return sum(1 for k in range(1, x + 1) if max(factor_trial(k), default=1) <= y)


def test_mobius_examples():
    assert [mobius(k) for k in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
    assert omega(1) == 0 and omega(12) == 2 and omega(30) == 3
    assert is_squarefree(30) and not is_squarefree(18)
    with pytest.raises(InvalidInput):
        mobius(0)


def test_mobius_against_trial_division():
    table = mobius_table(3000)
    for k in range(1, 3001):
        f = factor_trial(k)
        ref = 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)
        assert mobius(k) == ref == table[k]
        assert omega(k) == len(f)


def test_factor_beyond_sieve():
    s = FactorSieve.build(1000)
    assert s.factor(999_983 * 2) == {2: 1, 999_983: 1}
    assert s.factor(2 ** 10 * 3 ** 4) == {2: 10, 3: 4}
    with pytest.raises(AllocationCap):
        s.factor(1_000_003 * 1_000_033)


def test_divisors():
    assert divisors(1) == [1]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors_in_set(12, [1, 5, 6, 7]) == [1, 6]
    big = list(range(1, 200))
    assert divisors_in_set(36, big) == divisors(36)


def test_mobius_bracket_examples():
    assert mobius_bracket(6, 10) == 0
    assert mobius_bracket(6, 2) == 0
    assert mobius_bracket(1, 5) == 1
    assert mobius_bracket(12, 3) == 1 - 1 - 1


def test_finite_mobius_identity():
    for r in range(1, 301):
        for l in range(1, r + 1):
            assert mobius_bracket(l, r) == (1 if l == 1 else 0)


def test_bracket_bounded_by_two_to_omega():
    for l in range(1, 500):
        for r in (1, 2, 5, 17, 100):
            assert abs(mobius_bracket(l, r)) <= 2 ** omega(l)


def test_psi_examples():
    assert psi_smooth(10, 2) == 4
    assert psi_smooth(100, 5) == 34
    for x in range(1, 1001):
        assert psi_smooth(x, max(x, 2)) == x
    with pytest.raises(InvalidInput):
        psi_smooth(10, 1)


def test_psi_methods_agree_with_brute_force():
    rng = np.random.default_rng(13)
    for _ in range(40):
        x = int(rng.integers(1, 3000))
        y = int(rng.integers(2, 60))
        ref = psi_brute(x, y)
        assert psi_sieve(x, y) == ref
        assert psi_enumerate(x, y) == ref


def test_psi_enumerate_large():
    assert psi_enumerate(10 ** 6, 47) == psi_sieve(10 ** 6, 47)
    assert psi_smooth(2 * 10 ** 7, 5, sieve_limit=10 ** 6) == psi_enumerate(2 * 10 ** 7, 5)
    with pytest.raises(AllocationCap):
        psi_smooth(10 ** 9, 100)


def _psi_ratio(x):
    y = int(math.log(x) ** 2)
    return psi_smooth(x, y) / math.sqrt(x)


def test_psi_ratio_grows():
    vals = [_psi_ratio(10 ** k) for k in (3, 4, 5, 6)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.xfail(strict=True, reason="measured growth from 10^3 to 10^4 is 2.097x, "
                                       "above the factor 2 bound stated for this diagnostic")
def test_psi_ratio_growth_at_most_double():
    vals = [_psi_ratio(10 ** k) for k in (3, 4, 5, 6)]
    assert all(b / a <= 2.0 for a, b in zip(vals, vals[1:]))


def test_mobius_divisor_sum():
    for n in range(1, 10 ** 4 + 1):
        assert sum(mobius(d) for d in divisors(n)) == (1 if n == 1 else 0)


def test_divisors_in_set_examples():
    assert divisors_in_set(6, [1, 2, 3, 5]) == [1, 2, 3]
    assert divisors_in_set(7, [2, 4]) == []
    assert divisors_in_set(12, list(range(1, 13))) == [1, 2, 3, 4, 6, 12]


def test_sieve_invariants():
    s = FactorSieve.build(5000)
    primes = set(int(p) for p in s.primes)
    assert all(factor_trial(p) == {p: 1} for p in primes)
    for k in range(2, 5001):
        p = int(s.spf[k])
        assert k % p == 0 and p in primes and p == min(factor_trial(k))


def test_psi_sieve_vs_enumeration_random():
    rng = np.random.default_rng(14)
    for _ in range(50):
        x = int(rng.integers(1, 10 ** 5 + 1))
        y = int(rng.integers(2, 51))
        assert psi_sieve(x, y) == psi_enumerate(x, y)
