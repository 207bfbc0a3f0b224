"""Compare the pure and compiled reduction kernels.

Times the raw column-reduction kernel on synthetic sparse matrices and the
end-to-end sampled matching distance on random staircase modules, once per
available backend.

Run:  python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import random
import time

from multipres import kernels
from multipres.experiments import random_module


def synthetic_columns(rng: random.Random, nrows: int, ncols: int, fill: int, p: int):
    cols = []
    for _ in range(ncols):
        col = {}
        for _ in range(fill):
            col[rng.randrange(nrows)] = rng.randrange(1, p)
        cols.append(col)
    return cols


def time_kernel(impl, cols, p, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl.reduce_pivots(cols, p)
        impl.rank(cols, p)
        best = min(best, time.perf_counter() - t0)
    return best


def time_matching(backend_name: str, seed: int = 7) -> float:
    import multipres.kernels as k
    import multipres.fibered
    import multipres.metrics
    import multipres.presentation

    impl = k.backends()[backend_name]
    k.reduce_pivots = impl.reduce_pivots
    k.echelonize = impl.echelonize
    k.rank = impl.rank
    k.residual = impl.residual
    rng = random.Random(seed)
    P = random_module(rng, summands=3)
    Q = random_module(rng, summands=3)
    t0 = time.perf_counter()
    from multipres.metrics import matching_distance

    matching_distance(P, Q, slopes=16)
    return time.perf_counter() - t0


def main() -> None:
    rng = random.Random(0)
    available = kernels.backends()
    print(f"backends available: {', '.join(sorted(available))}")
    for p in (2, 5):
        for nrows, ncols, fill in ((64, 96, 8), (256, 384, 16)):
            cols = synthetic_columns(rng, nrows, ncols, fill, p)
            row = [f"reduce+rank p={p} {nrows}x{ncols} fill={fill}"]
            for name in sorted(available):
                dt = time_kernel(available[name], cols, p)
                row.append(f"{name}: {dt * 1e3:8.2f} ms")
            print("  ".join(row))
    for name in sorted(available):
        dt = time_matching(name)
        print(f"matching-distance end-to-end  {name}: {dt * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
