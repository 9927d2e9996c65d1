"""Timings of the hot kernels, numba build against numpy build.

Runs each kernel on fixed seeded inputs, best-of-5 wall time after a JIT
warmup, and prints the speedup together with the cross-build agreement so a
regression in either build or in their parity is visible in one place.

    python3 benchmarks/bench_kernels.py [--n-stable 4096] [--n-crp 10000]
        [--n-dcov 400] [--perms 199]
"""

import argparse
import math
import time

import numpy as np

from tiltcouple import _kernels
from tiltcouple.rng import RngStream


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_fk_step(n):
    rng = RngStream(42)
    E = rng.exponential(size=n)
    U = rng.uniform(size=n)
    alpha, tilt, tol = 0.5, 1.0, 1e-6
    g1ma = math.gamma(1.0 - alpha)
    c_env = alpha / ((1.0 - alpha) * g1ma)
    args = (0.0, 0.0, E, U, alpha, tilt, tol, g1ma, c_env)

    nb = _kernels.get_numba("fk_step")
    np_ = _kernels.get_numpy("fk_step")
    out_np = np_(*args)
    if nb is None:
        return "fk_step", None, best_of(lambda: np_(*args)), None
    nb(*args)
    out_nb = nb(*args)
    jumps_nb, jumps_np = out_nb[0], out_np[0]
    agree = (jumps_nb.size == jumps_np.size
             and out_nb[3] == out_np[3] and out_nb[5] == out_np[5]
             and np.allclose(jumps_nb, jumps_np, rtol=1e-12, atol=0.0))
    return ("fk_step", best_of(lambda: nb(*args)),
            best_of(lambda: np_(*args)), agree)


def bench_crp_fill(n):
    rng = RngStream(42)
    u = rng.uniform(size=n - 1)
    alpha, theta = 0.5, 0.0

    def run(kern):
        sizes = np.zeros(n, dtype=np.int64)
        cumw = np.zeros(n)
        K = kern(u, alpha, theta, sizes, cumw)
        return K, sizes[:K].copy()

    nb = _kernels.get_numba("crp_fill")
    np_ = _kernels.get_numpy("crp_fill")
    K_np, sizes_np = run(np_)
    if nb is None:
        return "crp_fill", None, best_of(lambda: run(np_)), None
    run(nb)
    K_nb, sizes_nb = run(nb)
    agree = K_nb == K_np and np.array_equal(sizes_nb, sizes_np)
    return ("crp_fill", best_of(lambda: run(nb)),
            best_of(lambda: run(np_)), agree)


def _centered_dist(x):
    d = np.abs(x[:, None] - x[None, :])
    return d - d.mean(axis=0) - d.mean(axis=1)[:, None] + d.mean()


def bench_dcov_perm(n, perms):
    rng = RngStream(42)
    A = _centered_dist(rng.gamma(1.0, size=n))
    B = _centered_dist(rng.gamma(2.0, size=n))
    P = np.stack([RngStream(42, p + 1).generator.permutation(n)
                  for p in range(perms)])

    nb = _kernels.get_numba("dcov_perm")
    np_ = _kernels.get_numpy("dcov_perm")
    out_np = np_(A, B, P)
    if nb is None:
        return "dcov_perm", None, best_of(lambda: np_(A, B, P)), None
    nb(A, B, P)
    out_nb = nb(A, B, P)
    agree = np.allclose(out_nb, out_np, rtol=1e-12, atol=1e-15)
    return ("dcov_perm", best_of(lambda: nb(A, B, P)),
            best_of(lambda: np_(A, B, P)), agree)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-stable", type=int, default=4096)
    ap.add_argument("--n-crp", type=int, default=10_000)
    ap.add_argument("--n-dcov", type=int, default=400)
    ap.add_argument("--perms", type=int, default=199)
    ns = ap.parse_args()

    rows = [bench_fk_step(ns.n_stable),
            bench_crp_fill(ns.n_crp),
            bench_dcov_perm(ns.n_dcov, ns.perms)]

    print(f"{'kernel':<12}{'numba':>12}{'numpy':>12}{'speedup':>10}"
          f"{'agree':>8}")
    for name, t_nb, t_np, agree in rows:
        if t_nb is None:
            print(f"{name:<12}{'n/a':>12}{t_np * 1e3:>10.3f}ms"
                  f"{'n/a':>10}{'n/a':>8}")
        else:
            print(f"{name:<12}{t_nb * 1e3:>10.3f}ms{t_np * 1e3:>10.3f}ms"
                  f"{t_np / t_nb:>9.1f}x{str(bool(agree)):>8}")


if __name__ == "__main__":
    main()
