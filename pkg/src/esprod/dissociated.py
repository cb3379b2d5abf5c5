"""Dissociation tests with explicit witnesses, and greedy dissociated subsets.

D = {d_1..d_m} is dissociated when sum eps_i d_i = 0 with eps_i in {-1, 0, 1}
forces every eps_i = 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInput, SumCap
from .product import FrequencySet, sup_norm

DEFAULT_TABLE_CAP = 10 ** 7
#: meet-in-the-middle is used for at most this many elements (3^(m/2) sums per half)
MITM_MAX_ELEMENTS = 26
#: keep per-step tables for backtracking while m * (2T + 1) bytes stays below this
BACKTRACK_BYTES = 1 << 28


@dataclass(frozen=True)
class DissociationWitness:
    verdict: str  # "dissociated" or "relation"
    elements: tuple[int, ...]
    epsilons: Optional[tuple[int, ...]] = None
    method: str = "table"

    def __post_init__(self):
        if self.verdict not in ("dissociated", "relation"):
            raise InvalidInput(f"bad verdict {self.verdict!r}")
        if self.verdict == "relation":
            eps = self.epsilons
            if eps is None or not any(eps):
                raise ValueError("relation witness must be nontrivial")
            if sum(e * d for e, d in zip(eps, self.elements)) != 0:
                raise ValueError("witness does not sum to zero")

    @property
    def is_dissociated(self) -> bool:
        return self.verdict == "dissociated"

    def relation_string(self) -> str:
        """Render as e.g. '1+2-3=0'; positive terms first."""
        if self.epsilons is None:
            return ""
        pos = [str(d) for e, d in zip(self.epsilons, self.elements) if e == 1]
        neg = [str(d) for e, d in zip(self.epsilons, self.elements) if e == -1]
        if not pos:
            pos, neg = neg, pos
        return "+".join(pos) + "".join("-" + x for x in neg) + "=0"


@dataclass
class SignedSumTable:
    """Representation counts (capped at 2) of each signed sum in [-T, T], stored at index s + T."""

    offset: int
    counts: np.ndarray

    @classmethod
    def empty(cls, total: int) -> "SignedSumTable":
        c = np.zeros(2 * total + 1, dtype=np.int8)
        c[total] = 1
        return cls(offset=total, counts=c)

    def count(self, s: int) -> int:
        i = s + self.offset
        if 0 <= i < self.counts.size:
            return int(self.counts[i])
        return 0

    def add(self, d: int) -> "SignedSumTable":
        """Table for the element set extended by d (the offset must already cover it)."""
        c = self.counts
        new = c.astype(np.int16)
        new[d:] += c[:-d]
        new[:-d] += c[d:]
        np.minimum(new, 2, out=new)
        return SignedSumTable(self.offset, new.astype(np.int8))


def _witness_from_tables(D: tuple[int, ...], tables: list[SignedSumTable]) -> tuple[int, ...]:
    # Walk back from sum 0, preferring eps = 0, then -1, then +1.
    m = len(D)
    eps = [0] * m
    s = 0
    nontrivial = False
    for i in range(m - 1, -1, -1):
        prev = tables[i]
        d = D[i]
        for e in (0, -1, 1):
            t = s - e * d
            if e == 0 and s == 0 and not nontrivial:
                ok = prev.count(0) >= 2
            else:
                ok = prev.count(t) >= 1
            if ok:
                eps[i] = e
                s = t
                nontrivial = nontrivial or e != 0
                break
        else:  # pragma: no cover - tables are consistent by construction
            raise AssertionError("backtracking failed")
    return tuple(eps)


def _table_method(D: tuple[int, ...]) -> DissociationWitness:
    T = sum(D)
    m = len(D)
    keep = m * (2 * T + 1) <= BACKTRACK_BYTES
    table = SignedSumTable.empty(T)
    tables = [table] if keep else []
    for d in D:
        table = table.add(d)
        if keep:
            tables.append(table)
    if table.count(0) == 1:
        return DissociationWitness("dissociated", D, method="table")
    if not keep:
        tables = [SignedSumTable.empty(T)]
        for d in D[:-1]:
            tables.append(tables[-1].add(d))
    return DissociationWitness("relation", D, _witness_from_tables(D, tables), method="table")


def _signed_sums(half: tuple[int, ...]):
    for eps in itertools.product((0, -1, 1), repeat=len(half)):
        yield sum(e * d for e, d in zip(eps, half)), eps


def _mitm_method(D: tuple[int, ...]) -> DissociationWitness:
    k = len(D) // 2
    left, right = D[:k], D[k:]
    seen: dict[int, tuple[int, ...]] = {}
    for s, eps in _signed_sums(left):
        if s == 0 and any(eps):
            return DissociationWitness("relation", D, eps + (0,) * len(right), method="mitm")
        seen.setdefault(s, eps)
    for s, eps in _signed_sums(right):
        if any(eps) and -s in seen:
            return DissociationWitness("relation", D, seen[-s] + eps, method="mitm")
    return DissociationWitness("dissociated", D, method="mitm")


def _canonical(w: DissociationWitness) -> DissociationWitness:
    # sign so that the largest element used carries -1, e.g. 1+2-3=0
    if w.epsilons is None:
        return w
    last = max(i for i, e in enumerate(w.epsilons) if e)
    if w.epsilons[last] == 1:
        w = DissociationWitness(w.verdict, w.elements, tuple(-e for e in w.epsilons), w.method)
    return w


def is_dissociated(D: FrequencySet, table_cap: int = DEFAULT_TABLE_CAP) -> DissociationWitness:
    """Exact dissociation test; returns a nontrivial relation when one exists."""
    els = D.elements
    if sum(els) <= table_cap:
        return _canonical(_table_method(els))
    if len(els) <= MITM_MAX_ELEMENTS:
        return _canonical(_mitm_method(els))
    raise SumCap(f"sum {sum(els)} exceeds table cap {table_cap} and m = {len(els)} "
                 f"exceeds meet-in-the-middle cap {MITM_MAX_ELEMENTS}")


def brute_force_dissociated(D) -> bool:
    """Exhaustive 3^m check (oracle for small sets)."""
    D = tuple(D)
    for eps in itertools.product((0, -1, 1), repeat=len(D)):
        if any(eps) and sum(e * d for e, d in zip(eps, D)) == 0:
            return False
    return True


class _ReachableSums:
    """Boolean reachability of signed sums of a growing set (grows its buffer on demand)."""

    def __init__(self, cap: int):
        self.cap = cap
        self.total = 0
        self.reach = np.ones(1, dtype=bool)

    def contains(self, s: int) -> bool:
        i = s + self.total
        return 0 <= i < self.reach.size and bool(self.reach[i])

    def add(self, d: int) -> None:
        new_total = self.total + d
        if new_total > self.cap:
            raise SumCap(f"kept sum {new_total} exceeds cap {self.cap}")
        r = np.zeros(2 * new_total + 1, dtype=bool)
        old = self.reach
        # old index i (sum i - total) lands at sum +-d or unchanged
        for shift in (0, d, 2 * d):
            r[shift: shift + old.size] |= old
        self.reach = r
        self.total = new_total


def max_dissociated_greedy(S: FrequencySet, order: str = "ascending",
                           cap: int = DEFAULT_TABLE_CAP) -> FrequencySet:
    """Scan S in the given order, keeping x iff x is not a signed sum of the kept elements.

    That test is equivalent to the kept set staying dissociated. The result is
    maximal, not necessarily maximum.
    """
    if order not in ("ascending", "descending"):
        raise InvalidInput("order must be 'ascending' or 'descending'")
    seq = S.elements if order == "ascending" else S.elements[::-1]
    state = _ReachableSums(cap)
    kept = []
    for x in seq:
        if not state.contains(x):
            kept.append(x)
            state.add(x)
    return FrequencySet.of(kept)


def dissociated_diag(S: FrequencySet, n_ambient: Optional[int] = None,
                     log_M: Optional[float] = None) -> dict:
    """Report greedy m, the scale sqrt(m / log n) and measured log M(S). Report only."""
    n_ambient = n_ambient or S.n
    asc = max_dissociated_greedy(S, "ascending")
    desc = max_dissociated_greedy(S, "descending")
    best = asc if asc.n >= desc.n else desc
    if log_M is None:
        log_M = sup_norm(S).log_max_found
    m = best.n
    scale = math.sqrt(m) / math.sqrt(math.log(n_ambient)) if n_ambient > 1 else math.inf
    return {
        "m": m,
        "m_ascending": asc.n,
        "m_descending": desc.n,
        "subset": list(best.elements),
        "scale": scale,
        "log_M": log_M,
        "n_ambient": n_ambient,
    }
