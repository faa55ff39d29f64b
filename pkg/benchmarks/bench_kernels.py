"""Numba vs pure-numpy timings for the two hot kernels.

Run with ``python3 benchmarks/bench_kernels.py``. Both flavours are called
directly, so the ``YOUNGOP_DISABLE_JIT`` flag does not matter here.
"""
import argparse
import time

import numpy as np

from youngop import _kernels as k
from youngop.symcalc import JACOBI_MAX_SWEEPS, JACOBI_TOL


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _random_sym(rng, n):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), n))
    x = (q * lam) @ q.T
    return 0.5 * (x + x.T)


def bench_jacobi(sizes, repeat, rng):
    print("jacobi_eigh (best of %d)" % repeat)
    print(f"{'n':>4} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>9} {'max |dlam|':>11}")
    for n in sizes:
        x = _random_sym(rng, n)
        tol = JACOBI_TOL * np.linalg.norm(x)
        k.jacobi_eigh_numba(x, tol, JACOBI_MAX_SWEEPS)  # compile outside the timing
        t_nb = _best_of(lambda: k.jacobi_eigh_numba(x, tol, JACOBI_MAX_SWEEPS), repeat)
        t_np = _best_of(lambda: k.jacobi_eigh_numpy(x, tol, JACOBI_MAX_SWEEPS), max(1, repeat // 5))
        d1 = np.sort(k.jacobi_eigh_numba(x, tol, JACOBI_MAX_SWEEPS)[0])
        d2 = np.sort(k.jacobi_eigh_numpy(x, tol, JACOBI_MAX_SWEEPS)[0])
        print(f"{n:>4} {t_nb:>12.3e} {t_np:>12.3e} {t_np / t_nb:>9.1f} {np.abs(d1 - d2).max():>11.2e}")


def bench_gap(sizes, repeat, rng):
    print("young_gap_scaled (best of %d)" % repeat)
    print(f"{'n':>9} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>9} {'max rel diff':>13}")
    for n in sizes:
        u = np.abs(rng.normal(0.0, 3.0, n))
        w = rng.uniform(0.0, 1.0, n)
        wl = 1.0 - w
        k.young_gap_scaled_numba(u[:4], w[:4], wl[:4])
        t_nb = _best_of(lambda: k.young_gap_scaled_numba(u, w, wl), repeat)
        t_np = _best_of(lambda: k.young_gap_scaled_numpy(u, w, wl), repeat)
        g1 = k.young_gap_scaled_numba(u, w, wl)
        g2 = k.young_gap_scaled_numpy(u, w, wl)
        rel = np.max(np.abs(g1 - g2) / np.maximum(np.abs(g2), 1e-300))
        print(f"{n:>9} {t_nb:>12.3e} {t_np:>12.3e} {t_np / t_nb:>9.1f} {rel:>13.2e}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=20)
    p.add_argument("--sizes", default="2,4,8,16,32,64", help="matrix sizes for Jacobi")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    bench_jacobi([int(s) for s in args.sizes.split(",")], args.repeat, rng)
    print()
    bench_gap([10**3, 10**5, 10**6], max(3, args.repeat // 4), rng)


if __name__ == "__main__":
    main()
