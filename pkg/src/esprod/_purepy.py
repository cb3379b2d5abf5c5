"""Numpy fallback for the compiled grid-scan kernel.

Accumulation order matches ``_core.lookup_sum`` exactly (ascending j, starting
from 0.0), so both backends return bit-identical arrays.
"""

import numpy as np

_CHUNK = 1 << 16


def lookup_sum(a, table, g_start, g_stop, num_threads=1):
    a = np.ascontiguousarray(a, dtype=np.int64)
    table = np.ascontiguousarray(table, dtype=np.float64)
    G = table.shape[0]
    total = g_stop - g_start
    out = np.empty(max(total, 0), dtype=np.float64)
    for lo in range(g_start, g_stop, _CHUNK):
        hi = min(lo + _CHUNK, g_stop)
        g = np.arange(lo, hi, dtype=np.int64)
        acc = np.zeros(hi - lo, dtype=np.float64)
        for step in a:
            acc += table[(g * step) % G]
        out[lo - g_start:hi - g_start] = acc
    return out
