import math
from fractions import Fraction

import numpy as np
import pytest

from esprod.bounds import (
    TruncationParams,
    cosine_min,
    dense_bound_terms,
    dense_lower_cert,
    dense_lower_cert_merged,
    relation_diag,
    truncated_log_factor,
    truncation_upper_bound,
)
from esprod.errors import InvalidInput, SetNotInRange
from esprod.product import FrequencySet, sup_norm

FS = FrequencySet.of
M12 = 16 / (3 * math.sqrt(3))


def cert_oracle(S, n, R, theta0):
    """Direct double sum with exact rational phases, in the order written."""
    L = Fraction(n) * Fraction(R)
    total = 0.0
    theta0 = Fraction(theta0)
    for j in S:
        k = 1
        while j * k < L:
            w = float(1 - Fraction(j * k) / L)
            total -= w / k * math.cos(2 * math.pi * float((j * k * theta0) % 1))
            k += 1
    return total


@pytest.mark.parametrize("J", [1, 4, 16, 100, 10 ** 4, 10 ** 6])
def test_truncation_params(J):
    p = TruncationParams.from_J(J)
    assert p.rho == pytest.approx(1 - 1 / math.sqrt(J))
    assert p.per_factor_error <= 2 / math.sqrt(J) + 1e-15
    if J > 1:
        assert 0 < p.rho < 1


@pytest.mark.parametrize("J", [16, 256, 4096])
def test_pointwise_truncation_inequality(J):
    rng = np.random.default_rng(J)
    theta = rng.random(1000)
    rho = 1 - 1 / math.sqrt(J)
    j = np.arange(1, J + 1)
    # independent evaluation of the damped partial sum
    series = -(np.cos(2 * np.pi * np.outer(theta, j)) @ (rho ** j / j))
    lhs = np.log(np.abs(1 - np.exp(2j * np.pi * theta)))
    assert np.all(lhs <= series + 2 / math.sqrt(J))
    lib = truncated_log_factor(theta, TruncationParams.from_J(J))
    assert np.allclose(lib, series, atol=1e-12)


def test_truncated_factor_closed_form_switch():
    # J large enough that the closed form is used; compare with the direct sum
    p = TruncationParams.from_J(10 ** 6)
    assert p.series_tail_bound < 1e-17
    x = np.array([0.1, 0.37, 0.5])
    j = np.arange(1, 10 ** 6 + 1)
    direct = np.array([-(np.cos(2 * np.pi * j * t) @ (p.rho ** j / j)) for t in x])
    assert np.allclose(truncated_log_factor(x, p), direct, atol=1e-10)


def test_truncation_examples():
    b = truncation_upper_bound(FS([1]), 10 ** 4)
    assert math.log(2) <= b.value <= 0.708 + 1e-3
    rho = 1 - 1e-2
    assert b.series_max == pytest.approx(math.log(1 + rho), abs=1e-9)
    assert b.argmax_theta == pytest.approx(0.5, abs=1e-6)
    assert not b.heuristic
    b2 = truncation_upper_bound(FS([1, 2]), 10 ** 4)
    assert float(b2) >= math.log(M12)
    with pytest.raises(InvalidInput):
        truncation_upper_bound(FS([1]), 3)


def test_truncation_monotone_in_J():
    for S in (FS(range(1, 11)), FS([1, 5, 9, 20, 33])):
        vals = [truncation_upper_bound(S, J).value for J in (64, 256, 1024, 4096)]
        for a, b in zip(vals, vals[1:]):
            assert b <= a + 1e-3
        assert vals[-1] >= sup_norm(S).log_max_found - 1e-6


def test_dense_cert_examples():
    c = dense_lower_cert(FS([1, 2]), 2, 2, Fraction(3, 8))
    assert c.value == pytest.approx(math.sqrt(2) / 3, abs=1e-12)
    assert c.value <= math.log(M12)
    c1 = dense_lower_cert(FS([1]), 1, 2, Fraction(3, 4))
    assert c1.value == pytest.approx(0.0, abs=1e-12)
    assert dense_lower_cert(FS([1, 2]), 2, 2) == c  # default theta0 = 3/(4n)
    S = FS(range(1, 101))
    c100 = dense_lower_cert(S, 100, 8)
    assert 0 < c100.value <= sup_norm(S).log_max_found


def test_dense_cert_terms_and_oracle(rng):
    for _ in range(30):
        n = int(rng.integers(2, 120))
        S = FS(sorted(rng.choice(np.arange(1, n + 1), size=int(rng.integers(1, n + 1)),
                                 replace=False).tolist()))
        R = int(rng.integers(2, 9))
        th = Fraction(3, 4 * n)
        c = dense_lower_cert(S, n, R)
        assert c.value == pytest.approx(cert_oracle(S, n, R, th), abs=1e-10)
        assert c.value == pytest.approx(dense_lower_cert_merged(S, n, R), abs=1e-10)
        assert c.term_first + c.term_second + c.term_third == pytest.approx(c.value, abs=1e-10)
        assert c.value <= sup_norm(S).log_max_found + 1e-6


def test_dense_cert_scan_not_worse():
    S = FS(range(1, 61))
    base = dense_lower_cert(S, 60, 8)
    scan = dense_lower_cert(S, 60, 8, scan=True)
    assert scan.scanned and scan.value >= base.value
    assert scan.value <= sup_norm(S).log_max_found + 1e-6


def test_dense_cert_errors():
    with pytest.raises(SetNotInRange):
        dense_lower_cert(FS([1, 5]), 4, 8)
    with pytest.raises(InvalidInput):
        dense_lower_cert(FS([1]), 4, 1)


def test_dense_bound_terms():
    first, second, third = dense_bound_terms(100, 8, 50)
    ref = 0.5 - 0.5 * math.sin(3 * math.pi / 200 * 100.5) / math.sin(3 * math.pi / 400)
    assert first == pytest.approx(ref, rel=1e-12)
    # within 0.5 of the asymptotic 1/(2 sin(3 pi / 4n))
    assert abs(first - 1 / (2 * math.sin(3 * math.pi / 400))) < 0.6
    assert second == pytest.approx(-6.3125)
    totals = [sum(dense_bound_terms(n, 8, 50)) for n in (100, 200, 400)]
    assert all(t > 0 for t in totals)
    for a, b in zip(totals, totals[1:]):
        assert 1.6 <= b / a <= 2.4
    with pytest.raises(InvalidInput):
        dense_bound_terms(10, 8, 1)


def test_cosine_min():
    r = cosine_min(FS([1]))
    assert r.min_value == pytest.approx(-1.0, abs=1e-12)
    assert r.argmin_theta == pytest.approx(0.5, abs=1e-9)
    r2 = cosine_min(FS([1, 2]))
    assert r2.min_value == pytest.approx(-9 / 8, abs=1e-12)
    assert math.cos(2 * math.pi * r2.argmin_theta) == pytest.approx(-0.25, abs=1e-7)
    assert r2.negated == pytest.approx(9 / 8)
    rng = np.random.default_rng(9)
    for _ in range(10):
        S = FS(sorted(set(rng.integers(1, 300, 15).tolist())))
        r = cosine_min(S)
        theta = np.arange(1 << 16) / (1 << 16)
        dense = (np.cos(2 * np.pi * np.outer(theta, S.array))).sum(axis=1).min()
        assert -S.n <= r.min_value <= dense + 1e-12
        assert r.min_value >= dense - 1e-2


def test_relation_diag_reports():
    d = relation_diag(FS(range(1, 21)))
    assert set(d) == {"n", "log_M", "neg_cos_min", "neg_cos_min_times_log_n"}
    assert d["neg_cos_min"] > 0
