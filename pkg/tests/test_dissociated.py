import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esprod.constructions import lacunary_set
from esprod.dissociated import (
    DissociationWitness,
    SignedSumTable,
    brute_force_dissociated,
    dissociated_diag,
    is_dissociated,
    max_dissociated_greedy,
)
from esprod.errors import InvalidInput, SumCap
from esprod.product import FrequencySet

FS = FrequencySet.of


def check_witness(w, D):
    if w.verdict == "relation":
        assert any(w.epsilons)
        assert all(e in (-1, 0, 1) for e in w.epsilons)
        assert sum(e * d for e, d in zip(w.epsilons, D.elements)) == 0


def test_examples():
    w = is_dissociated(FS([1, 2, 3]))
    assert w.verdict == "relation" and w.epsilons == (1, 1, -1)
    assert w.relation_string() == "1+2-3=0"
    assert is_dissociated(FS([1, 2, 4, 8])).is_dissociated
    w = is_dissociated(FS([3, 5, 7, 15]))
    assert w.epsilons == (1, 1, 1, -1) and w.relation_string() == "3+5+7-15=0"
    assert is_dissociated(FS([6, 10, 15])).is_dissociated
    assert is_dissociated(FS([5])).is_dissociated


def test_witness_validation():
    with pytest.raises(ValueError):
        DissociationWitness("relation", (1, 2), (1, 1))
    with pytest.raises(ValueError):
        DissociationWitness("relation", (1, 2), (0, 0))
    with pytest.raises(InvalidInput):
        DissociationWitness("maybe", (1,))


def test_signed_sum_table_counts():
    t = SignedSumTable.empty(6)
    for d in (1, 2, 3):
        t = t.add(d)
    assert t.count(0) == 2  # trivial and 1+2-3, capped at 2
    assert t.count(6) == 1 and t.count(-6) == 1
    assert t.count(7) == 0


def test_random_against_brute_force():
    rng = np.random.default_rng(21)
    for _ in range(200):
        m = int(rng.integers(1, 11))
        D = FS(sorted(rng.choice(np.arange(1, 101), size=m, replace=False).tolist()))
        ref = brute_force_dissociated(D.elements)
        for cap in (10 ** 7, 0):  # table method, then meet-in-the-middle
            w = is_dissociated(D, table_cap=cap)
            assert w.is_dissociated == ref
            check_witness(w, D)


def test_sum_cap():
    D = FS([10 ** 9 + k for k in range(30)])
    with pytest.raises(SumCap):
        is_dissociated(D, table_cap=1000)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 12), st.floats(3.0, 4.0))
def test_lacunary_dissociated(start, m, q):
    # ratio >= 3 makes each element exceed twice the sum of the earlier ones
    from fractions import Fraction

    S = lacunary_set(Fraction(q).limit_denominator(100), m, start)
    assert is_dissociated(S).is_dissociated


def test_lacunary_ratio_just_above_two_can_fail():
    from fractions import Fraction

    S = lacunary_set(Fraction(33, 16), 4, 1)
    assert S == FS([1, 3, 5, 9])
    assert is_dissociated(S).relation_string() == "1+3+5-9=0"


def test_dominating_sets_dissociated():
    rng = np.random.default_rng(22)
    for _ in range(50):
        els, total = [], 0
        for _ in range(int(rng.integers(1, 12))):
            x = 2 * total + int(rng.integers(1, 5))
            els.append(x)
            total += x
        assert is_dissociated(FS(els)).is_dissociated


def test_greedy_examples():
    assert max_dissociated_greedy(FS([1, 2, 3, 4])) == FS([1, 2, 4])
    assert max_dissociated_greedy(FS([1, 2, 3]), "descending") == FS([2, 3])
    P = FS([2 ** k for k in range(12)])
    assert max_dissociated_greedy(P) == P
    with pytest.raises(InvalidInput):
        max_dissociated_greedy(P, "sideways")


def test_greedy_dissociated_maximal_and_closed():
    rng = np.random.default_rng(23)
    for _ in range(40):
        S = FS(sorted(rng.choice(np.arange(1, 200), size=int(rng.integers(1, 25)), replace=False).tolist()))
        for order in ("ascending", "descending"):
            G = max_dissociated_greedy(S, order)
            assert is_dissociated(G).is_dissociated
            for x in S:
                if x not in G:
                    assert not is_dissociated(FS(list(G) + [x])).is_dissociated
            if G.n > 1:
                drop = int(rng.integers(0, G.n))
                sub = FS([g for i, g in enumerate(G) if i != drop])
                assert is_dissociated(sub).is_dissociated


def test_diag_examples():
    d = dissociated_diag(FS([1, 2, 3]))
    assert d["m"] == 2
    assert d["scale"] == pytest.approx(math.sqrt(2) / math.sqrt(math.log(3)))
    assert d["log_M"] > 0
    # log M supplied: the default grid for N = 2^19 is large and m is the point here
    assert dissociated_diag(FS([2 ** k for k in range(20)]), log_M=0.0)["m"] == 20
    assert dissociated_diag(FS([6, 10, 15]))["m"] == 3
