"""Compare the compiled and pure-Python policy kernels on a synthetic catalogue.

    python benchmarks/bench_kernels.py --clusters 20 --per-cluster 100 --repeat 3
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hqs import kernels
from hqs.guidance import SimilarityKind
from hqs.scoring import FlatModel
from hqs.synthetic import gaussian_clusters, matching_hierarchy


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--clusters", type=int, default=20)
    ap.add_argument("--per-cluster", type=int, default=100)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cat, _ = gaussian_clusters(args.clusters, args.per_cluster, args.dim, args.seed)
    t0 = time.perf_counter()
    h = matching_hierarchy(cat)
    print(f"items={len(cat)} dim={args.dim} nodes={h.node_count} height={h.height} (tree built in {time.perf_counter() - t0:.2f}s)")
    print(f"backends: {', '.join(kernels.BACKENDS)} (default {kernels.BACKEND})")
    rows = np.arange(len(cat), dtype=np.int64)
    for kind in SimilarityKind:
        model = FlatModel(h, cat, kind)
        timing = {}
        results = {}
        for name in kernels.BACKENDS:
            timing[name] = best_of(lambda: results.__setitem__(name, kernels.evaluate_rows(model, 0.01, 1.0, rows, name)), args.repeat)
            print(f"  {kind.value:14s} {name:8s} {timing[name] * 1e3:9.1f} ms  {len(rows) / timing[name]:12.0f} items/s")
        if len(timing) == 2:
            gap = float(np.max(np.abs(results["compiled"][0] - results["python"][0])))
            print(f"  {kind.value:14s} speedup {timing['python'] / timing['compiled']:.1f}x, max value difference {gap:.1e}")


if __name__ == "__main__":
    main()
