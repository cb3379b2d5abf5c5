# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid-scan kernel.

Computes out[g - g_start] = sum_j table[(a_j * g) mod G] for a range of grid
indices. The j-sum is accumulated in ascending j for every g, so results are
bit-identical to the numpy fallback and independent of the thread count.
"""

import numpy as np
from cython.parallel cimport prange

cdef enum:
    CHUNK = 2048


cdef void _scan_chunk(const long long[::1] a, const double[::1] table,
                      long long G, long long g0, long long g1,
                      double[::1] out, long long offset) noexcept nogil:
    cdef Py_ssize_t j, n = a.shape[0]
    cdef long long g, idx, step
    for g in range(g0, g1):
        out[g - offset] = 0.0
    for j in range(n):
        step = a[j]
        idx = (step * g0) % G
        for g in range(g0, g1):
            out[g - offset] += table[idx]
            idx += step
            if idx >= G:
                idx -= G


def lookup_sum(const long long[::1] a, const double[::1] table,
               long long g_start, long long g_stop, int num_threads=1):
    """Sum table lookups over a contiguous range of grid indices.

    ``a`` must already be reduced modulo ``len(table)``.
    """
    cdef long long G = table.shape[0]
    cdef long long total = g_stop - g_start
    if total <= 0:
        return np.empty(0, dtype=np.float64)
    out = np.empty(total, dtype=np.float64)
    cdef double[::1] o = out
    cdef long long nchunks = (total + CHUNK - 1) // CHUNK
    cdef long long c, lo, hi
    if num_threads < 1:
        num_threads = 1
    for c in prange(nchunks, nogil=True, num_threads=num_threads, schedule="static"):
        lo = g_start + c * CHUNK
        hi = lo + CHUNK
        if hi > g_stop:
            hi = g_stop
        _scan_chunk(a, table, G, lo, hi, o, g_start)
    return out
