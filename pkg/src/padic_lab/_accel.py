"""Hot loops: axis-wise exact DFT on coefficient arrays and the K[m]
conjugation average.  Each kernel has a numba version and a numpy version;
PADIC_LAB_NO_JIT=1 (or a missing numba) selects numpy.
"""
from __future__ import annotations

import os
import threading

import numpy as np

# An old system TBB makes numba warn on first parallel launch; omp/workqueue are fine.
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
if "PADIC_LAB_THREADS" in os.environ:
    os.environ.setdefault("NUMBA_NUM_THREADS", os.environ["PADIC_LAB_THREADS"])

try:  # pragma: no cover - exercised implicitly
    import numba
    from numba import njit, prange
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


# workqueue aborts on concurrent parallel launches; report threads share one pool
_PARALLEL_LOCK = threading.Lock()


def use_jit() -> bool:
    return HAVE_NUMBA and os.environ.get("PADIC_LAB_NO_JIT", "") not in ("1", "true", "yes")


def set_threads(n: int) -> int:
    """Cap the numba pool at n threads; returns the count in effect.

    Each parallel loop owns its output rows, so results do not depend on n.
    """
    if not HAVE_NUMBA:
        return 1
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


# ------------------------------------------------------------------ DFT

def dft_axis_numpy(c: np.ndarray, s: int, w: int, shift: int) -> np.ndarray:
    """out[j, r, e + s*i*j*shift] += c[i, r, e]; c has shape (L, R, n), L = p^w."""
    L, R, n = c.shape
    out = np.zeros_like(c)
    for i in range(L):
        ci = c[i]
        if not ci.any():
            continue
        for j in range(L):
            k = (s * i * j * shift) % n
            out[j] += np.roll(ci, k, axis=-1)
    return out


def dft_axis_complex_numpy(c: np.ndarray, s: int, L: int) -> np.ndarray:
    """out[j] = sum_i c[i] exp(2 pi i s i j / L); c has shape (L, R)."""
    i = np.arange(L)
    F = np.exp(2j * np.pi * ((s * np.outer(i, i)) % L) / L)
    return F.T @ c


if HAVE_NUMBA:
    @njit(cache=True)
    def _dft_axis_jit(c, s, shift):
        L, R, n = c.shape
        out = np.zeros_like(c)
        for i in range(L):
            for j in range(L):
                k = (s * i * j * shift) % n
                for r in range(R):
                    for e in range(n):
                        v = c[i, r, e]
                        if v != 0:
                            out[j, r, (e + k) % n] += v
        return out


def dft_axis(c: np.ndarray, s: int, w: int, shift: int) -> np.ndarray:
    if use_jit() and c.dtype == np.int64:
        return _dft_axis_jit(np.ascontiguousarray(c), np.int64(s), np.int64(shift))
    return dft_axis_numpy(c, s, w, shift)


# ---------------------------------------------------------- K[m] average

def _cells_numpy(A, B, G, D, base, wpow, strides):
    idx = np.zeros(A.shape, dtype=np.int64)
    ok = np.ones(A.shape, dtype=bool)
    for X, k in ((A, 0), (B, 1), (G, 2), (D, 3)):
        ok &= (X % base[k]) == 0
        idx += ((X // base[k]) % wpow[k]) * strides[k]
    return np.where(ok, idx, -1)


def km_average_numpy(X, params, mod, base, wpow, strides, vals):
    """Sum over params (x, y, z, zinv) of vals[cell(Ad(n'(x) n(y) a(z)) xi)] for each xi.

    X has shape (npts, 4) with residues mod `mod`; vals has shape (ncells, n).
    """
    a0, b0, g0, d0 = (X[:, k].astype(np.int64) for k in range(4))
    out = np.zeros((X.shape[0],) + vals.shape[1:], dtype=vals.dtype)
    for x, y, z, zi in params:
        b1 = (z * b0) % mod
        g1 = (zi * g0) % mod
        a2 = (a0 + y * g1) % mod
        b2 = (b1 - 2 * y * a0 - ((y * y) % mod) * g1) % mod
        a3 = (a2 - x * b2) % mod
        g3 = (g1 + 2 * x * a2 - ((x * x) % mod) * b2) % mod
        idx = _cells_numpy(a3, b2, g3, d0, base, wpow, strides)
        hit = idx >= 0
        if hit.any():
            out[hit] += vals[idx[hit]]
    return out


if HAVE_NUMBA:
    @njit(cache=True, parallel=True)
    def _km_average_jit(X, params, mod, base, wpow, strides, vals):
        npts = X.shape[0]
        nv = vals.shape[1]
        out = np.zeros((npts, nv), dtype=vals.dtype)
        for t in prange(npts):
            a0 = X[t, 0]
            b0 = X[t, 1]
            g0 = X[t, 2]
            d0 = X[t, 3]
            for k in range(params.shape[0]):
                x = params[k, 0]
                y = params[k, 1]
                z = params[k, 2]
                zi = params[k, 3]
                b1 = (z * b0) % mod
                g1 = (zi * g0) % mod
                a2 = (a0 + y * g1) % mod
                b2 = (b1 - 2 * y * a0 - ((y * y) % mod) * g1) % mod
                a3 = (a2 - x * b2) % mod
                g3 = (g1 + 2 * x * a2 - ((x * x) % mod) * b2) % mod
                cs = (a3, b2, g3, d0)
                idx = 0
                ok = True
                for q in range(4):
                    v = cs[q]
                    if v % base[q] != 0:
                        ok = False
                        break
                    idx += ((v // base[q]) % wpow[q]) * strides[q]
                if ok:
                    for e in range(nv):
                        out[t, e] += vals[idx, e]
        return out


def km_average(X, params, mod, base, wpow, strides, vals):
    if mod >= 2**31:
        raise OverflowError("modulus too large for int64 products")
    if use_jit():
        args = (np.ascontiguousarray(X, dtype=np.int64), np.ascontiguousarray(params, dtype=np.int64),
                np.int64(mod), np.asarray(base, dtype=np.int64), np.asarray(wpow, dtype=np.int64),
                np.asarray(strides, dtype=np.int64), np.ascontiguousarray(vals))
        with _PARALLEL_LOCK:
            return _km_average_jit(*args)
    return km_average_numpy(np.asarray(X, dtype=np.int64), params, mod,
                            np.asarray(base), np.asarray(wpow), np.asarray(strides), vals)
