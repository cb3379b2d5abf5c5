"""Compare the compiled and numpy grid-scan kernels.

    python benchmarks/bench_scan.py [--n 512] [--grid 1048576] [--repeat 3]
"""

import argparse
import time

import numpy as np

from esprod import _purepy
from esprod.kernels import log_table

try:
    from esprod import _core
except ImportError:  # extension not built
    _core = None


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=512, help="set size ({1..n})")
    p.add_argument("--grid", type=int, default=1 << 20)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args(argv)

    a = np.arange(1, args.n + 1, dtype=np.int64)
    T = log_table(args.grid)
    stop = args.grid // 2 + 1
    lookups = args.n * stop

    t_py, ref = _time(lambda: _purepy.lookup_sum(a, T, 0, stop), args.repeat)
    print(f"numpy   {t_py:8.3f} s  {lookups / t_py / 1e6:8.1f} M lookups/s")
    if _core is None:
        print("cython  (not built)")
        return
    t_cy, out = _time(lambda: _core.lookup_sum(a, T, 0, stop, args.threads), args.repeat)
    same = np.array_equal(out, ref)
    print(f"cython  {t_cy:8.3f} s  {lookups / t_cy / 1e6:8.1f} M lookups/s  "
          f"threads={args.threads}  speedup {t_py / t_cy:.1f}x  identical={same}")


if __name__ == "__main__":
    main()
