"""Compare the compiled kernels against the pure-python fallback.

Usage: python benchmarks/bench_kernels.py [repeats]
"""

import math
import sys
import time

import numpy as np

from storyorder._kernels import _pure

try:
    from storyorder._kernels import _speedups
except ImportError:
    _speedups = None


def timeit(fn, *args, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench(repeats=5):
    gen = np.random.default_rng(0)
    cases = []

    for n in (5, 8):
        m = gen.uniform(-1, 1, size=(n, n))
        np.fill_diagonal(m, -np.inf)
        cases.append((f"exhaustive n={n} ({math.factorial(n)} orders)", "best_path_exhaustive", (m,)))

    m64 = gen.uniform(-1, 1, size=(64, 64))
    np.fill_diagonal(m64, -np.inf)
    cases.append(("greedy n=64", "best_path_greedy", (m64,)))

    seq = gen.integers(0, 10_000, size=10_000).astype(np.int64)
    cases.append(("inversions n=10000", "count_inversions", (seq,)))

    print(f"{'kernel':<34} {'pure':>10} {'cython':>10} {'speedup':>8}")
    for label, name, args in cases:
        pure_t = timeit(getattr(_pure, name), *args, repeats=repeats)
        if _speedups is None:
            print(f"{label:<34} {pure_t * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")
            continue
        fast_t = timeit(getattr(_speedups, name), *args, repeats=repeats)
        assert getattr(_pure, name)(*args) == getattr(_speedups, name)(*args)
        print(
            f"{label:<34} {pure_t * 1e3:>8.2f}ms {fast_t * 1e3:>8.2f}ms "
            f"{pure_t / fast_t:>7.1f}x"
        )


if __name__ == "__main__":
    bench(repeats=int(sys.argv[1]) if len(sys.argv) > 1 else 5)
