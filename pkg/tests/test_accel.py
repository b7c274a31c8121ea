import os
import subprocess
import sys

import numpy as np
import pytest

from padic_lab import _accel
from padic_lab.schwartz import km_params

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def test_dft_jit_matches_numpy():
    rng = np.random.default_rng(0)
    c = rng.integers(-3, 4, (9, 5, 27)).astype(np.int64)
    assert np.array_equal(_accel._dft_axis_jit(c, 2, 3), _accel.dft_axis_numpy(c, 2, 2, 3))


def test_km_average_jit_matches_numpy():
    rng = np.random.default_rng(1)
    p, m, r, P = 3, 1, 3, 6
    mod = p**P
    params = km_params(p, m, r, P)
    X = rng.integers(0, mod, (40, 4)).astype(np.int64)
    X[:, 3] = 0
    base = np.array([1, 3, 3, 1], dtype=np.int64)
    wpow = np.array([27, 9, 9, 1], dtype=np.int64)
    strides = np.array([81, 9, 1, 0], dtype=np.int64)
    vals = rng.integers(-2, 3, (27 * 81, 3)).astype(np.int64)
    a = _accel._km_average_jit(X, params, np.int64(mod), base, wpow, strides, vals)
    b = _accel.km_average_numpy(X, params, mod, base, wpow, strides, vals)
    assert np.array_equal(a, b)


def test_thread_count_does_not_change_result():
    rng = np.random.default_rng(2)
    params = km_params(3, 1, 3, 6)
    X = rng.integers(0, 3**6, (64, 4)).astype(np.int64)
    args = (params, np.int64(3**6), np.array([1, 3, 3, 1]), np.array([27, 9, 9, 1]), np.array([81, 9, 1, 0]))
    vals = rng.integers(-2, 3, (27 * 81, 3)).astype(np.int64)
    _accel.set_threads(1)
    one = _accel._km_average_jit(X, *args, vals)
    _accel.set_threads(8)
    many = _accel._km_average_jit(X, *args, vals)
    assert np.array_equal(one, many)


def test_no_jit_switch():
    code = ("from padic_lab import _accel; from padic_lab.characters import SigmaClass;"
            "from padic_lab.kernels import build_f, compute_phi, normalization_integral, profile_I;"
            "K = build_f(3, SigmaClass(5, 1, 1), 1);"
            "print(_accel.use_jit(), normalization_integral(profile_I(compute_phi(K))))")
    env = dict(os.environ, PADIC_LAB_NO_JIT="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "10"]


def test_concurrent_callers_share_the_pool():
    code = """
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from padic_lab import _accel
from padic_lab.schwartz import km_params
_accel.set_threads(4)
rng = np.random.default_rng(3)
params = km_params(3, 1, 3, 6)
vals = rng.integers(-2, 3, (27 * 81, 3)).astype(np.int64)
Xs = [rng.integers(0, 3**6, (256, 4)).astype(np.int64) for _ in range(16)]
call = lambda X: _accel.km_average(X, params, 3**6, [1, 3, 3, 1], [27, 9, 9, 1], [81, 9, 1, 0], vals)
with ThreadPoolExecutor(8) as ex:
    got = list(ex.map(call, Xs))
assert all(np.array_equal(g, call(X)) for g, X in zip(got, Xs))
print("ok")
"""
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "ok"
