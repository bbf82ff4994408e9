"""Time the numba-jitted kernels against their pure-numpy fallbacks.

Run: python benchmarks/bench_kernels.py [--repeats 7]

The first jitted call pays compilation, so every kernel is warmed up before
timing; reported numbers are the median of the repeats.
"""

import argparse
import time

import numpy as np

from fluctlab import _kernels as kernels


def _median_time(fn, args, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return sorted(times)[len(times) // 2]


def _cases():
    rng = np.random.default_rng(0)
    for n_grid, n_max in ((4096, 80), (65536, 200)):
        xi = rng.uniform(-20.0, 20.0, n_grid)
        yield (f"hermite_basis(grid={n_grid}, n_max={n_max})",
               kernels._hermite_basis_np, kernels._hermite_basis_nb, (xi, n_max))
    for nodes in (512, 2048):
        xs = np.linspace(-10.0, 10.0, nodes)
        ps = np.linspace(-10.0, 10.0, nodes)
        yield (f"reduced_scan({nodes}x{nodes})",
               kernels._reduced_scan_np, kernels._reduced_scan_nb, (xs, ps, 0.0, 0.0, 2.0, 0.318))
        yield (f"gauss_scan({nodes}x{nodes})",
               kernels._gauss_scan_np, kernels._gauss_scan_nb, (xs, ps, 0.0, 0.0, 1.0, 0.25, 0.318))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    if not kernels.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return

    print(f"{'kernel':44s} {'numpy':>12s} {'numba':>12s} {'speedup':>8s}")
    for label, np_fn, nb_fn, fn_args in _cases():
        nb_fn(*fn_args)  # warm up the JIT
        t_np = _median_time(np_fn, fn_args, args.repeats)
        t_nb = _median_time(nb_fn, fn_args, args.repeats)
        print(f"{label:44s} {t_np * 1e3:10.3f}ms {t_nb * 1e3:10.3f}ms {t_np / t_nb:7.2f}x")


if __name__ == "__main__":
    main()
