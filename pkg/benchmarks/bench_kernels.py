"""Benchmark the numba kernels against the pure-numpy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 7]

Each kernel is warmed up first so numba compilation time stays out of the
numbers.  The same inputs go through both paths and results are checked to
agree before timing.
"""

import argparse
import time

import numpy as np

from reflectionless import _kernels


def timeit(fn, args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(name, numba_fn, numpy_fn, args, repeats, check=None):
    out_np = numpy_fn(*args)
    if numba_fn is not None:
        out_nb = numba_fn(*args)  # warm-up / compile
        if check is not None:
            check(out_np, out_nb)
        t_nb = timeit(numba_fn, args, repeats)
    else:
        t_nb = None
    t_np = timeit(numpy_fn, args, repeats)
    if t_nb is None:
        print(f"{name:<22} numpy {t_np * 1e3:8.3f} ms   numba    (unavailable)")
    else:
        print(
            f"{name:<22} numpy {t_np * 1e3:8.3f} ms   numba {t_nb * 1e3:8.3f} ms   "
            f"speedup {t_np / t_nb:6.1f}x"
        )


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()
    rng = np.random.RandomState(0)

    have_numba = _kernels.NUMBA_ENABLED
    print(f"numba available: {have_numba}\n")

    # continued-fraction m function: 240-site sweep over a 512-point z grid
    n_sites, n_z = 240, 512
    a = 1.0 + 0.2 * rng.rand(n_sites)
    b = 0.1 * rng.randn(n_sites)
    z = rng.uniform(-2, 2, n_z) + 1j * rng.uniform(0.5, 3.0, n_z)
    seed = np.full(n_z, 0.3j, dtype=complex)
    bench_case(
        "cf_plus",
        getattr(_kernels, "cf_plus_numba", None) if have_numba else None,
        _kernels.cf_plus_numpy,
        (a, b, z, seed),
        args.repeats,
        check=lambda x, y: np.testing.assert_allclose(x, y, rtol=1e-12),
    )
    bench_case(
        "cf_minus",
        getattr(_kernels, "cf_minus_numba", None) if have_numba else None,
        _kernels.cf_minus_numpy,
        (a, b, z, seed),
        args.repeats,
        check=lambda x, y: np.testing.assert_allclose(x, y, rtol=1e-12),
    )

    # moment-flow integration: 41 moments, 200 steps (the two paths differ by
    # summation order, so agreement degrades with integration length)
    N, R = 40, 2.0
    s0 = np.zeros(N + 1)
    s0[0] = 1.0
    bounds = R ** (np.arange(N + 1) + 2.0) * (1 + 1e-9)
    bench_case(
        "flow_integrate",
        getattr(_kernels, "flow_integrate_numba", None) if have_numba else None,
        _kernels.flow_integrate_numpy,
        (s0, 1.0 / (20.0 * R), 200, bounds, 1e-6),
        args.repeats,
        check=lambda x, y: np.testing.assert_allclose(x[0], y[0], rtol=1e-6, atol=1e-10),
    )

    # Riccati path: 640 steps forward, 4 forward-stable spectral parameters
    steps = 640
    xs = np.linspace(0, 1, steps + 1)
    v_nodes = -2.0 / np.cosh(xs) ** 2
    v_mids = -2.0 / np.cosh(xs[:-1] + 0.5 / steps) ** 2
    w = np.array([0.1, 0.02, 0.1j, 0.05 + 0.05j])
    p0 = 0.1 * w
    bench_case(
        "riccati_path",
        getattr(_kernels, "riccati_path_numba", None) if have_numba else None,
        _kernels.riccati_path_numpy,
        (p0, v_nodes, v_mids, 1.0 / steps, w),
        args.repeats,
        check=lambda x, y: np.testing.assert_allclose(x, y, rtol=1e-12),
    )


if __name__ == "__main__":
    main()
