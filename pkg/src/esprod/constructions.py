"""Set generators: intervals, Fejer-weighted random selectors, lacunary sets, best-of-K."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import CapOverflow, EmptySample, InvalidInput
from .product import FrequencySet, sup_norm

#: largest element lacunary_set will produce
LACUNARY_CAP = 1 << 62
_U53 = float(1 << 53)


def interval_set(n: int) -> FrequencySet:
    if n < 1:
        raise InvalidInput("interval_set needs n >= 1")
    return FrequencySet(tuple(range(1, n + 1)))


def selector_probabilities(n: int) -> np.ndarray:
    """p_j = 1 - j/n for j = 1..n-1."""
    j = np.arange(1, n, dtype=np.float64)
    return 1.0 - j / n


def selector_uniforms(n: int, seed: int) -> np.ndarray:
    """u_j in [0, 1) for j = 1..n-1, from Philox keyed by seed at counter position j - 1.

    Philox is counter based, so u_j depends only on (seed, j).
    """
    if seed < 0 or seed >= 1 << 64:
        raise InvalidInput("seed must be a 64-bit unsigned integer")
    raw = np.random.Philox(key=seed).random_raw(n - 1)
    return (raw >> np.uint64(11)).astype(np.float64) / _U53


@dataclass(frozen=True)
class SelectorSample:
    n: int
    seed: int
    chosen: FrequencySet
    probabilities: tuple[float, ...] = field(repr=False)

    @property
    def size(self) -> int:
        return self.chosen.n

    def xi(self) -> np.ndarray:
        """0/1 selector values for j = 1..n-1."""
        out = np.zeros(self.n - 1, dtype=np.int64)
        out[np.asarray(self.chosen.elements) - 1] = 1
        return out


def fejer_selector_sample(n: int, seed: int) -> SelectorSample:
    """Include j < n independently with probability 1 - j/n."""
    if n < 2:
        raise InvalidInput("fejer_selector_sample needs n >= 2")
    p = selector_probabilities(n)
    u = selector_uniforms(n, seed)
    chosen = np.flatnonzero(u < p) + 1
    if chosen.size == 0:
        raise EmptySample(f"no element selected for n={n}, seed={seed}")
    return SelectorSample(n=n, seed=seed,
                          chosen=FrequencySet(tuple(int(x) for x in chosen)),
                          probabilities=tuple(float(x) for x in p))


def selector_decomposition(sample: SelectorSample, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of sum xi_l cos(2 pi l theta) = F_n(theta)/2 - 1/2 + sum (xi_l - p_l) cos(2 pi l theta)."""
    from .kernels import fejer_kernel

    theta = np.asarray(theta, dtype=np.float64)
    n = sample.n
    ell = np.arange(1, n, dtype=np.float64)
    C = np.cos(2 * np.pi * np.outer(theta, ell))
    xi = sample.xi().astype(np.float64)
    p = np.asarray(sample.probabilities)
    lhs = C @ xi
    Fn = np.array([fejer_kernel(n, float(x)) for x in theta])
    rhs = 0.5 * Fn - 0.5 + C @ (xi - p)
    return lhs, rhs


@dataclass(frozen=True)
class TrialSummary:
    seed: int
    size: int
    log_M: float
    argmax_theta: float
    grid_size: int


@dataclass(frozen=True)
class SearchResult:
    best: SelectorSample
    best_log_M: float
    trials: int
    per_trial: tuple[TrialSummary, ...]


def _objective(name: str):
    if name == "logM":
        return lambda s: s.log_M
    if name == "logM_per_sqrt":
        # log M normalised by sqrt(|S|), compares samples of different size
        return lambda s: s.log_M / math.sqrt(s.size)
    raise InvalidInput(f"unknown objective {name!r}")


def best_of(n: int, trials: int, seed0: int, eval_opts: Optional[dict] = None,
            objective: str = "logM") -> SearchResult:
    """Draw samples at seeds seed0 .. seed0 + trials - 1 and keep the one minimising the objective.

    Ties go to the lower seed. best_log_M is always the measured log M of the best sample.
    """
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    key = _objective(objective)
    opts = dict(eval_opts or {})
    summaries = []
    samples = {}
    for seed in range(seed0, seed0 + trials):
        s = fejer_selector_sample(n, seed)
        est = sup_norm(s.chosen, **opts)
        summaries.append(TrialSummary(seed=seed, size=s.size, log_M=est.log_max_found,
                                      argmax_theta=est.argmax_theta, grid_size=est.grid_size))
        samples[seed] = s
    best = min(summaries, key=lambda t: (key(t), t.seed))
    return SearchResult(best=samples[best.seed], best_log_M=best.log_M,
                        trials=trials, per_trial=tuple(summaries))


def lacunary_set(q, m: int, start: int) -> FrequencySet:
    """{ceil(start q^k) : 0 <= k < m}, exact in rationals; a repeat is bumped to previous + 1."""
    q = Fraction(q)
    if q <= 1:
        raise InvalidInput("q must exceed 1")
    if m < 1 or start < 1:
        raise InvalidInput("lacunary_set needs m >= 1 and start >= 1")
    out = []
    x = Fraction(start)
    for _ in range(m):
        v = math.ceil(x)
        if out and v <= out[-1]:
            v = out[-1] + 1
        if v > LACUNARY_CAP:
            raise CapOverflow(f"lacunary element {v} exceeds cap {LACUNARY_CAP}")
        out.append(v)
        x *= q
    return FrequencySet(tuple(out))
