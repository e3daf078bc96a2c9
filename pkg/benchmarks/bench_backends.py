"""Timing comparison of the compiled and pure-Python compute kernels.

Run directly: python benchmarks/bench_backends.py
"""

from __future__ import annotations

import time

import numpy as np

from macroml._backend import backends


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_problems(seed=0):
    rng = np.random.default_rng(seed)
    n, p = 400, 60
    Z = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[:6] = rng.standard_normal(6)
    y = Z @ beta + 0.5 * rng.standard_normal(n)
    sq = (
        np.sum(Z * Z, axis=1)[:, None]
        + np.sum(Z * Z, axis=1)[None, :]
        - 2.0 * Z @ Z.T
    )
    K = np.exp(-np.maximum(sq, 0.0) / (2.0 * 25.0))
    idx = rng.integers(0, n, size=n)
    return Z, y, K, idx


def main():
    Z, y, K, idx = make_problems()
    rows = []
    for name, mod in backends().items():
        t_en = _time(lambda: mod.enet_cd(np.asfortranarray(Z), y, 5.0, 0.5, 2000, 1e-10, None))
        t_svr = _time(lambda: mod.svr_smo(K, y, 1.0, 0.1 * y.std(), 1e-6, 0))
        t_tree = _time(lambda: [
            mod.grow_tree(Z, y, idx, 20, 5, -1, 12345 + b) for b in range(20)
        ])
        tree = mod.grow_tree(Z, y, idx, 20, 5, -1, 99)
        t_pred = _time(lambda: [mod.predict_tree(*tree, Z) for _ in range(50)])
        rows.append((name, t_en, t_svr, t_tree, t_pred))

    header = f"{'backend':<10}{'enet_cd':>12}{'svr_smo':>12}{'grow x20':>12}{'pred x50':>12}"
    print(header)
    print("-" * len(header))
    for name, *ts in rows:
        print(f"{name:<10}" + "".join(f"{t * 1e3:>10.1f}ms" for t in ts))
    if len(rows) == 2:
        by = {r[0]: r[1:] for r in rows}
        if "c" in by and "python" in by:
            speed = [p / c for p, c in zip(by["python"], by["c"])]
            print("\nspeedup (python/c): " + ", ".join(f"{s:.1f}x" for s in speed))


if __name__ == "__main__":
    main()
