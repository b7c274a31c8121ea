"""Compare the numba kernels with their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per workload with the best wall time of each backend and
checks that both produce identical results.
"""
import argparse
import os
import time

import numpy as np

from padic_lab import _accel
from padic_lab.characters import SigmaClass
from padic_lab.kernels import build_f, compute_phi
from padic_lab.schwartz import km_params, smooth_adjoint


def best(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def with_backend(no_jit: bool, fn):
    old = os.environ.get("PADIC_LAB_NO_JIT")
    os.environ["PADIC_LAB_NO_JIT"] = "1" if no_jit else "0"
    try:
        return fn()
    finally:
        if old is None:
            del os.environ["PADIC_LAB_NO_JIT"]
        else:
            os.environ["PADIC_LAB_NO_JIT"] = old


def equal(a, b):
    return a.equals(b) if hasattr(a, "equals") else np.array_equal(a, b)


def workloads():
    rng = np.random.default_rng(0)
    c = rng.integers(-3, 4, (81, 64, 27)).astype(np.int64)
    yield "dft_axis 81x64x27", lambda: _accel.dft_axis(c, 2, 4, 1)

    params = km_params(3, 1, 4, 8)
    X = rng.integers(0, 3**8, (2000, 4)).astype(np.int64)
    vals = rng.integers(-2, 3, (27 * 81, 9)).astype(np.int64)
    yield "km_average 2000 pts", lambda: _accel.km_average(
        X, params, 3**8, [1, 3, 3, 1], [27, 9, 9, 1], [81, 9, 1, 0], vals)

    K = build_f(4, SigmaClass(3, 1, 1), 1)
    yield "compute_phi (3,4,1)", lambda: compute_phi(build_f(4, SigmaClass(3, 1, 1), 1))
    phi = compute_phi(K)
    yield "smooth_adjoint (3,4,1) m=1", lambda: smooth_adjoint(phi, 1)
    yield "smooth_adjoint direct (3,4,1) m=1", lambda: smooth_adjoint(phi, 1, method="direct")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'workload':36s} {'numba s':>9s} {'numpy s':>9s} {'speedup':>8s}  same")
    for name, fn in workloads():
        with_backend(False, fn)  # compile outside the timed region
        tj, rj = with_backend(False, lambda: best(fn, args.repeat))
        tn, rn = with_backend(True, lambda: best(fn, args.repeat))
        print(f"{name:36s} {tj:9.4f} {tn:9.4f} {tn / tj:8.1f}x  {equal(rj, rn)}")


if __name__ == "__main__":
    main()
