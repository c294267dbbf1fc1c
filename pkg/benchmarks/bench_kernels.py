"""Timing comparison of the pure-Python and compiled integer kernels.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Both backends compute identical exact results; this script reports wall
times and the speedup of the compiled twin on matrix products and
division-free characteristic polynomials over seeded integer inputs.
"""

import random
import time

from conecrafter._kernels import _pykernels

try:
    from conecrafter._kernels import _ckernels
except ImportError:
    _ckernels = None


def _random_flat(rng, n, m, bound):
    return [rng.randint(-bound, bound) for _ in range(n * m)]


def _time(fn, repeats):
    best = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best * 1000.0


def bench_matmul(impl, rng, n, repeats=5):
    a = _random_flat(rng, n, n, 10**6)
    b = _random_flat(rng, n, n, 10**6)
    return _time(lambda: impl.imat_mul(a, b, n, n, n), repeats)


def bench_charpoly(impl, rng, n, repeats=5):
    a = _random_flat(rng, n, n, 50)
    return _time(lambda: impl.berkowitz_charpoly(a, n), repeats)


def main():
    if _ckernels is None:
        print("compiled backend unavailable; build it with `pip install -e .`")
        return
    rows = []
    for n in (16, 32, 48):
        rng = random.Random(42)
        pure = bench_matmul(_pykernels, rng, n)
        rng = random.Random(42)
        comp = bench_matmul(_ckernels, rng, n)
        rows.append((f"imat_mul {n}x{n}", pure, comp))
    for n in (8, 12, 16):
        rng = random.Random(42)
        pure = bench_charpoly(_pykernels, rng, n)
        rng = random.Random(42)
        comp = bench_charpoly(_ckernels, rng, n)
        rows.append((f"berkowitz {n}x{n}", pure, comp))
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'pure ms':>9}  {'compiled ms':>11}  {'speedup':>7}")
    for label, pure, comp in rows:
        print(f"{label:<{width}}  {pure:9.3f}  {comp:11.3f}  {pure / comp:6.2f}x")


if __name__ == "__main__":
    main()
