"""Exact amplitudes in Q(zeta_{p^K}), scalar or array valued.

An amplitude array stores integer coefficients c[..., e] against the powers
zeta^e (e mod p^K) together with one rational scale shared by the array and an
optional factor sqrt(p).  The canonical basis drops every exponent whose top
base-p digit equals p-1, using sum_i zeta^{i p^{K-1} + j} = 0.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable

import numpy as np

from .errors import DomainError

_BIG = 2**62


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def reduce_coeffs(c: np.ndarray, p: int, K: int) -> np.ndarray:
    """Canonical form along the last axis (returns a new array)."""
    c = np.array(c, copy=True)
    if K == 0:
        return c
    n = p**K
    blk = n // p
    r = c.reshape(c.shape[:-1] + (p, blk))
    top = r[..., p - 1, :].copy()
    r[..., : p - 1, :] -= top[..., None, :]
    r[..., p - 1, :] = 0
    return r.reshape(c.shape)


class CycArray:
    """Array of elements of Q(zeta_{p^K}); shape excludes the coefficient axis."""
    __slots__ = ("p", "K", "c", "scale", "half")

    def __init__(self, c: np.ndarray, p: int, K: int, scale=1, half: bool = False, canonical: bool = False):
        c = np.asarray(c)
        if c.dtype != object:
            c = c.astype(np.int64, copy=False)
        if c.shape[-1] != p**K:
            raise DomainError(f"coefficient axis {c.shape[-1]} != p^K = {p**K}")
        self.p, self.K = p, K
        self.c = c if canonical else reduce_coeffs(c, p, K)
        self.scale = _fr(scale)
        self.half = bool(half)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, shape, p: int, K: int = 0) -> "CycArray":
        return cls(np.zeros(tuple(shape) + (p**K,), dtype=np.int64), p, K, canonical=True)

    @classmethod
    def roots(cls, exps, p: int, K: int, mult=None, mask=None) -> "CycArray":
        """mult * zeta_{p^K}^exps elementwise (mult defaults to 1; mask zeroes entries)."""
        exps = np.asarray(exps, dtype=np.int64) % (p**K)
        c = np.zeros(exps.shape + (p**K,), dtype=np.int64)
        vals = np.ones(exps.shape, dtype=np.int64) if mult is None else np.broadcast_to(
            np.asarray(mult, dtype=np.int64), exps.shape)
        if mask is not None:
            vals = vals * np.asarray(mask, dtype=np.int64)
        np.put_along_axis(c, exps[..., None], vals[..., None], axis=-1)
        return cls(c, p, K)

    @classmethod
    def root_of_unity(cls, angle: Fraction, p: int) -> "CycArray":
        """Scalar exp(2 pi i angle) for an angle with p-power denominator."""
        angle = _fr(angle) % 1
        d = angle.denominator
        K = 0
        while p**K < d:
            K += 1
        if p**K != d:
            raise DomainError(f"denominator {d} is not a power of {p}")
        return cls.roots(np.array(angle.numerator), p, K)

    @classmethod
    def scalar(cls, x, p: int) -> "CycArray":
        x = _fr(x)
        return cls(np.array([1], dtype=np.int64), p, 0, scale=x)

    # -- structure ----------------------------------------------------------
    @property
    def shape(self):
        return self.c.shape[:-1]

    @property
    def n(self) -> int:
        return self.p**self.K

    def __getitem__(self, idx) -> "CycArray":
        if not isinstance(idx, tuple):
            idx = (idx,)
        sub = self.c[idx + (Ellipsis,)] if Ellipsis not in idx else self.c[idx]
        if sub.shape[-1] != self.n:
            raise IndexError("indexing must not touch the coefficient axis")
        return CycArray(sub, self.p, self.K, self.scale, self.half, canonical=True)

    def reshape(self, *shape) -> "CycArray":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return CycArray(self.c.reshape(tuple(shape) + (self.n,)), self.p, self.K,
                        self.scale, self.half, canonical=True)

    def transpose(self, axes) -> "CycArray":
        axes = tuple(axes) + (len(axes),)
        return CycArray(np.ascontiguousarray(self.c.transpose(axes)), self.p, self.K,
                        self.scale, self.half, canonical=True)

    def copy(self) -> "CycArray":
        return CycArray(self.c.copy(), self.p, self.K, self.scale, self.half, canonical=True)

    def with_coeffs(self, c: np.ndarray, canonical: bool = False) -> "CycArray":
        return CycArray(c, self.p, self.K, self.scale, self.half, canonical=canonical)

    # -- level management ---------------------------------------------------
    def lift(self, K2: int) -> "CycArray":
        if K2 < self.K:
            raise DomainError("lift target below current level")
        if K2 == self.K:
            return self
        c = np.zeros(self.shape + (self.p**K2,), dtype=self.c.dtype)
        c[..., :: self.p ** (K2 - self.K)] = self.c
        return CycArray(c, self.p, K2, self.scale, self.half)

    def lowerable(self) -> bool:
        if self.K == 0:
            return False
        idx = np.arange(self.n) % self.p != 0
        return not np.any(self.c[..., idx])

    def minimize(self) -> "CycArray":
        """Lower to the smallest level containing every entry."""
        x = self
        while x.lowerable():
            x = CycArray(np.ascontiguousarray(x.c[..., :: x.p]), x.p, x.K - 1, x.scale, x.half, canonical=True)
        return x

    def _align(self, other: "CycArray"):
        if self.p != other.p:
            raise DomainError("mismatched primes")
        K = max(self.K, other.K)
        return self.lift(K), other.lift(K)

    def normalized(self) -> "CycArray":
        """Pull the gcd of all coefficients into the scale."""
        g = 0
        if self.c.size:
            g = int(np.gcd.reduce(np.abs(self.c).ravel().astype(object))) if self.c.dtype == object \
                else int(np.gcd.reduce(np.abs(self.c).ravel()))
        if g in (0, 1):
            return self if g == 1 else CycArray(self.c, self.p, self.K, 1, False, canonical=True)
        return CycArray(self.c // g, self.p, self.K, self.scale * g, self.half, canonical=True)

    # -- arithmetic -----------------------------------------------------------
    def _common_scale(self, other: "CycArray"):
        a, b = self._align(other)
        if a.half != b.half:
            if not a.c.any():
                a = CycArray(a.c, a.p, a.K, 0, b.half, canonical=True)
            elif not b.c.any():
                b = CycArray(b.c, b.p, b.K, 0, a.half, canonical=True)
            else:
                raise DomainError("cannot add amplitudes with and without a sqrt(p) factor")
        sa, sb = a.scale, b.scale
        if sa == 0:
            return a.c * 0, b.c, sb, a, b
        if sb == 0:
            return a.c, b.c * 0, sa, a, b
        L = Fraction(gcd(sa.numerator, sb.numerator), (sa.denominator * sb.denominator) // gcd(sa.denominator, sb.denominator))
        fa, fb = sa / L, sb / L
        assert fa.denominator == 1 and fb.denominator == 1
        ca = _safe_mul(a.c, fa.numerator)
        cb = _safe_mul(b.c, fb.numerator)
        return ca, cb, L, a, b

    def __add__(self, other) -> "CycArray":
        if not isinstance(other, CycArray):
            other = CycArray.scalar(other, self.p)
        ca, cb, L, a, _ = self._common_scale(other)
        return CycArray(ca + cb, a.p, a.K, L, a.half or other.half, canonical=True)

    __radd__ = __add__

    def __neg__(self) -> "CycArray":
        return CycArray(self.c, self.p, self.K, -self.scale, self.half, canonical=True)

    def __sub__(self, other) -> "CycArray":
        return self + (-other if isinstance(other, CycArray) else -_fr(other))

    def __rsub__(self, other) -> "CycArray":
        return (-self) + other

    def __mul__(self, other) -> "CycArray":
        if isinstance(other, CycArray):
            return self.mul(other)
        return CycArray(self.c, self.p, self.K, self.scale * _fr(other), self.half, canonical=True)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CycArray":
        return CycArray(self.c, self.p, self.K, self.scale / _fr(other), self.half, canonical=True)

    def times_sqrt_p(self) -> "CycArray":
        if self.half:
            return CycArray(self.c, self.p, self.K, self.scale * self.p, False, canonical=True)
        return CycArray(self.c, self.p, self.K, self.scale, True, canonical=True)

    def mul(self, other: "CycArray") -> "CycArray":
        """Elementwise product (cyclic convolution along the coefficient axis)."""
        a, b = self._align(other)
        n = a.n
        bound = int(np.abs(a.c).max(initial=0)) * int(np.abs(b.c).max(initial=0)) * n
        dtype = object if bound >= _BIG else np.int64
        A = a.c.astype(dtype)
        B = b.c.astype(dtype)
        shape = np.broadcast_shapes(A.shape[:-1], B.shape[:-1])
        out = np.zeros(shape + (n,), dtype=dtype)
        for i in np.nonzero(np.any(A.reshape(-1, n) != 0, axis=0))[0]:
            out += np.roll(A[..., i:i + 1] * B, i, axis=-1)
        half = a.half and b.half
        scale = a.scale * b.scale * (a.p if half else 1)
        return CycArray(_maybe_int64(out), a.p, a.K, scale, a.half != b.half)

    def conj(self) -> "CycArray":
        n = self.n
        idx = (-np.arange(n)) % n
        return CycArray(self.c[..., idx], self.p, self.K, self.scale, self.half)

    def sum(self, axis=None) -> "CycArray":
        if axis is None:
            c = self.c.reshape(-1, self.n).sum(axis=0)
        else:
            axes = (axis,) if isinstance(axis, int) else tuple(axis)
            axes = tuple(a % len(self.shape) for a in axes)
            c = self.c.sum(axis=axes)
        return CycArray(c, self.p, self.K, self.scale, self.half)

    # -- comparison -----------------------------------------------------------
    def equals(self, other: "CycArray") -> np.ndarray:
        """Elementwise exact equality."""
        if not isinstance(other, CycArray):
            other = CycArray.scalar(other, self.p)
        a, b = self._align(other)
        if a.half != b.half:
            za = ~np.any(a.c, axis=-1) | (a.scale == 0)
            zb = ~np.any(b.c, axis=-1) | (b.scale == 0)
            return za & zb
        ca, cb, _, _, _ = a._common_scale(b)
        return np.all(ca == cb, axis=-1)

    def is_zero(self) -> np.ndarray:
        if self.scale == 0:
            return np.ones(self.shape, dtype=bool)
        return ~np.any(self.c, axis=-1)

    def all_equal(self, other) -> bool:
        return bool(np.all(self.equals(other)))

    # -- numerics -------------------------------------------------------------
    def to_complex(self) -> np.ndarray:
        w = np.exp(2j * np.pi * np.arange(self.n) / self.n)
        s = float(self.scale) * (np.sqrt(self.p) if self.half else 1.0)
        return (self.c.astype(np.float64) @ w) * s

    def rational_value(self) -> np.ndarray | None:
        """Object array of Fractions if every entry is rational (and no sqrt factor)."""
        x = self.minimize()
        if x.K != 0 or x.half:
            return None
        return np.vectorize(lambda v: Fraction(int(v)) * x.scale, otypes=[object])(x.c[..., 0])

    def triples(self) -> list:
        """(angle numerator, angle denominator, coefficient) for a scalar, scale folded in when integral."""
        x = self.minimize()
        if x.shape != ():
            raise DomainError("triples() is defined for scalars")
        out = []
        for e in np.nonzero(x.c)[0]:
            a = Fraction(int(e), x.n)
            out.append((a.numerator, a.denominator, int(x.c[e])))
        return out

    def __repr__(self) -> str:
        if self.shape == ():
            terms = " + ".join(f"{c}*z{d}^{n}" for n, d, c in self.triples()) or "0"
            extra = "*sqrt(p)" if self.half else ""
            return f"Cyc(({terms})*{self.scale}{extra})"
        return f"CycArray(shape={self.shape}, p={self.p}, K={self.K}, scale={self.scale})"


def _safe_mul(c: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return c
    mx = int(np.abs(c).max(initial=0))
    if c.dtype == object or mx * abs(k) >= _BIG:
        return c.astype(object) * k
    return c * k


def _maybe_int64(c: np.ndarray) -> np.ndarray:
    if c.dtype != object:
        return c
    mx = max((abs(int(v)) for v in c.ravel()), default=0)
    return c.astype(np.int64) if mx < _BIG else c


def stack(items: Iterable[CycArray]) -> CycArray:
    items = list(items)
    K = max(x.K for x in items)
    p = items[0].p
    items = [x.lift(K) for x in items]
    base = items[0]
    for x in items[1:]:
        if x.half != base.half:
            raise DomainError("stack needs a common sqrt(p) flag")
    # common scale
    L = Fraction(0)
    for x in items:
        if x.scale != 0:
            L = x.scale if L == 0 else Fraction(gcd(L.numerator, x.scale.numerator),
                                                L.denominator * x.scale.denominator // gcd(L.denominator, x.scale.denominator))
    if L == 0:
        L = Fraction(1)
    cs = [_safe_mul(x.c, int(x.scale / L)) for x in items]
    return CycArray(np.stack(cs), p, K, L, base.half, canonical=True)


def inner_sum(a: CycArray, b: CycArray) -> CycArray:
    """sum over all entries of a * conj(b), as a scalar amplitude."""
    a, b = a._align(b)
    n = a.n
    A = a.c.reshape(-1, n)
    B = b.c.reshape(-1, n)
    bound = int(np.abs(A).max(initial=0)) * int(np.abs(B).max(initial=0)) * max(A.shape[0], 1)
    if bound < 2**52:
        M = np.rint(A.T.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
    elif bound < _BIG:
        M = A.T @ B
    else:
        M = A.T.astype(object) @ B.astype(object)
    # zeta^e * conj(zeta^f) = zeta^(e-f)
    e = np.arange(n)
    diff = (e[:, None] - e[None, :]) % n
    r = np.zeros(n, dtype=M.dtype)
    np.add.at(r, diff.ravel(), M.ravel())
    half = a.half and b.half
    scale = a.scale * b.scale * (a.p if half else 1)
    return CycArray(_maybe_int64(r), a.p, a.K, scale, a.half != b.half)
