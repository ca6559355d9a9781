"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run with ``python benchmarks/bench_kernels.py``.  When the environment
variable LOCRATE_NO_NUMBA=1 is set only the numpy path is timed.
"""

from __future__ import annotations

import time

import numpy as np

from locrate import _kernels


def _time(fn, *args, repeat: int = 5) -> float:
    fn(*args)  # warm-up (includes JIT compilation for the numba path)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_capacity_batch():
    rng = np.random.default_rng(0)
    n_sub, n_path, n_real = 51, 10, 20_000
    steer = (rng.standard_normal((n_sub, n_path))
             + 1j * rng.standard_normal((n_sub, n_path)))
    phases = rng.uniform(-np.pi, np.pi, (n_real, n_path))
    print(f"capacity_batch  ({n_real} realizations x {n_sub} subcarriers "
          f"x {n_path} paths)")
    t_np = _time(_kernels._capacity_batch_numpy, steer, phases, 1.0)
    print(f"  numpy fallback: {t_np * 1e3:8.2f} ms")
    if _kernels.NUMBA_ENABLED:
        t_nb = _time(_kernels.capacity_batch, steer, phases, 1.0)
        print(f"  numba kernel:   {t_nb * 1e3:8.2f} ms   "
              f"(speedup {t_np / t_nb:.1f}x)")
        ref = _kernels._capacity_batch_numpy(steer, phases, 1.0)
        got = _kernels.capacity_batch(steer, phases, 1.0)
        assert np.allclose(ref, got, rtol=1e-12), "kernel variants disagree"


def bench_min_in_ellipse():
    rng = np.random.default_rng(1)
    n_grid, n_query = 120, 100_000
    xs = np.arange(n_grid) * 1.0
    ys = np.arange(n_grid) * 1.0
    values = rng.standard_normal((n_grid, n_grid))
    pts = rng.uniform(0, n_grid - 1, (n_query, 2))
    args = (xs, ys, values, pts, 0.3, 0.05, 0.2, 9.0)
    print(f"min_in_ellipse  ({n_query} queries on a {n_grid}x{n_grid} grid)")
    t_np = _time(_kernels._min_in_ellipse_numpy, *args)
    print(f"  numpy fallback: {t_np * 1e3:8.2f} ms")
    if _kernels.NUMBA_ENABLED:
        t_nb = _time(_kernels.min_in_ellipse, *args)
        print(f"  numba kernel:   {t_nb * 1e3:8.2f} ms   "
              f"(speedup {t_np / t_nb:.1f}x)")
        ref = _kernels._min_in_ellipse_numpy(*args)
        got = _kernels.min_in_ellipse(*args)
        assert np.array_equal(ref, got), "kernel variants disagree"


if __name__ == "__main__":
    if not _kernels.NUMBA_ENABLED:
        print("numba disabled (LOCRATE_NO_NUMBA=1 or import failure); "
              "timing numpy fallback only\n")
    bench_capacity_batch()
    bench_min_in_ellipse()
