"""Benchmark the numba kernels against the pure-Python fallback.

Usage:
    python benchmarks/bench_kernels.py [--n 400] [--extra-factor 3] [--reps 5]

Times the three hot kernels (single-source Dijkstra batch, all-pairs
sweep, ball carving) on a synthetic instance with both backends and
prints the speedup. The same arrays go through both paths and the
outputs are asserted identical.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dynembed.decomposition import draw_radii, separation_rate
from dynembed.harness import synthetic_graph
from dynembed.kernels import _numba as knb
from dynembed.kernels import _python as kpy


def timeit(fn, reps):
    best = float("inf")
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--extra-factor", type=int, default=3)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    n = args.n
    g = synthetic_graph(n, 64, np.random.default_rng(args.seed),
                        extra_edges=args.extra_factor * n, init_w_upper=32)
    w2 = 2 * g.weights
    r2 = g.delta // 2
    radii = draw_radii(separation_rate(n, r2), r2 // 2, n,
                       np.random.default_rng(args.seed + 1))
    sources = list(range(0, n, max(1, n // 64)))

    # warm the JIT once so compilation is not measured
    tiny = synthetic_graph(8, 4, np.random.default_rng(1))
    tw2 = 2 * tiny.weights
    knb.dijkstra(tiny.indptr, tiny.indices, tw2, 0, -1)
    knb.all_pairs(tiny.indptr, tiny.indices, tw2)
    knb.carve(tiny.indptr, tiny.indices, tw2,
              np.ones(tiny.n, dtype=np.int64))

    print(f"instance: n={n} m={g.m} | reps={args.reps} (best-of)")
    print(f"{'kernel':<22}{'python':>12}{'numba':>12}{'speedup':>10}")

    def bench(name, py_fn, nb_fn, check):
        t_py, out_py = timeit(py_fn, args.reps)
        t_nb, out_nb = timeit(nb_fn, args.reps)
        assert check(out_py, out_nb), f"{name}: backend outputs differ"
        print(f"{name:<22}{t_py * 1e3:>10.1f}ms{t_nb * 1e3:>10.1f}ms"
              f"{t_py / t_nb:>9.1f}x")

    bench(
        f"dijkstra x{len(sources)}",
        lambda: [kpy.dijkstra(g.indptr, g.indices, w2, s, -1) for s in sources],
        lambda: [knb.dijkstra(g.indptr, g.indices, w2, s, -1) for s in sources],
        lambda a, b: all(np.array_equal(x, y) for x, y in zip(a, b)),
    )
    bench(
        "all_pairs",
        lambda: kpy.all_pairs(g.indptr, g.indices, w2),
        lambda: knb.all_pairs(g.indptr, g.indices, w2),
        np.array_equal,
    )
    bench(
        "carve",
        lambda: kpy.carve(g.indptr, g.indices, w2, radii),
        lambda: knb.carve(g.indptr, g.indices, w2, radii),
        lambda a, b: np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]),
    )


if __name__ == "__main__":
    main()
