import math

import numpy as np
import pytest

from esprod import product
from esprod.product import FrequencySet

# (n, log_max_found) of every SupNormEstimate built during the session
FLOOR_RECORDS: list[tuple[int, float]] = []
ACCEPTANCE_LINES: dict[int, str] = {}


def floor_violations(records):
    # exp(v) >= sqrt(2n) - 1e-6, compared in log space so huge values cannot overflow
    return [(n, v) for n, v in records if v < math.log(math.sqrt(2 * n) - 1e-6)]


@pytest.fixture(autouse=True)
def _floor_guard(monkeypatch):
    """Record every estimate and enforce the sqrt(2n) floor after each test."""
    seen = []
    orig = product.SupNormEstimate.__post_init__

    def post_init(self):
        orig(self)
        seen.append((self.n, self.log_max_found))

    monkeypatch.setattr(product.SupNormEstimate, "__post_init__", post_init)
    yield seen
    FLOOR_RECORDS.extend(seen)
    bad = floor_violations(seen)
    assert not bad, f"estimates below sqrt(2n): {bad[:5]}"


@pytest.fixture
def acceptance():
    def report(k: int, ok: bool, detail: str = ""):
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        ACCEPTANCE_LINES[k] = line
        print(line)
        return ok
    return report


def pytest_collection_modifyitems(items):
    # the floor criterion audits every estimate of the session, so it runs last
    last = [it for it in items if it.name == "test_criterion_02_floor"]
    items[:] = [it for it in items if it not in last] + last


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
    if FLOOR_RECORDS:
        terminalreporter.write_line(
            f"sqrt(2n) floor checked on {len(FLOOR_RECORDS)} estimates, "
            f"{len(floor_violations(FLOOR_RECORDS))} violations")


def random_set(rng: np.random.Generator, upper: int, max_size: int | None = None) -> FrequencySet:
    size = int(rng.integers(1, (max_size or upper) + 1))
    return FrequencySet.of(sorted(rng.choice(np.arange(1, upper + 1), size=size, replace=False).tolist()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
