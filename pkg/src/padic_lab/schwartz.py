"""Windowed Schwartz-Bruhat functions on B = M2(Q_p) and the operators
acting on them.

Coordinates.  The same matrix space carries two charts:
  source  x  = [[d - a/2, b], [c, d + a/2]]
  dual    xi = [[delta/2 + alpha, beta], [gamma, delta/2 - alpha]]
with pairing <x, xi> = tr(x adj(xi)) = alpha a + delta d - beta c - gamma b.
The Fourier transform uses psi(<x, xi>) and the self-dual measure, so it maps
functions in one chart to functions in the other.

A GridFnB stores, per coordinate, a window [lo, hi): the function vanishes
off p^lo and is constant on cosets of p^hi.  Cell index i along an axis
stands for the coset p^lo * i + p^hi.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import _accel
from .cyclo import CycArray, inner_sum
from .errors import DomainError, PrecisionLoss, WindowError
from .padic import INT64_SAFE, inv_mod_array, ord_p, residue, unit_part, vord

CHARTS = ("source", "dual")
# source axis k pairs with dual axis _PAIR[k] with sign _SIGN[k]
_PAIR = (0, 2, 1, 3)
_SIGN = (1, -1, -1, 1)


# ------------------------------------------------------------------ group

class GroupElem:
    """Element of PGL2(Q_p) held as an exact rational 2x2 matrix."""
    __slots__ = ("m",)

    def __init__(self, m: Sequence):
        m = tuple(Fraction(x) for x in (m if len(m) == 4 else (m[0][0], m[0][1], m[1][0], m[1][1])))
        if m[0] * m[3] - m[1] * m[2] == 0:
            raise DomainError("singular matrix")
        self.m = m

    @property
    def det(self) -> Fraction:
        a, b, c, d = self.m
        return a * d - b * c

    def __matmul__(self, other: "GroupElem") -> "GroupElem":
        a, b, c, d = self.m
        e, f, g, h = other.m
        return GroupElem((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h))

    def inv(self) -> "GroupElem":
        a, b, c, d = self.m
        D = self.det
        return GroupElem((d / D, -b / D, -c / D, a / D))

    def normalized(self, p: int, M: int) -> tuple[int, int, int, int]:
        """Canonical representative: primitive integral, first unit entry = 1, residues mod p^M."""
        v = min(ord_p(x, p) for x in self.m if x != 0)
        scaled = [x / Fraction(p) ** v for x in self.m]
        lead = next(x for x in scaled if x != 0 and ord_p(x, p) == 0)
        return tuple(residue(x / lead, p, M) for x in scaled)

    def same_coset(self, other: "GroupElem", p: int, M: int) -> bool:
        return self.normalized(p, M) == other.normalized(p, M)

    def traceless_matrix(self) -> np.ndarray:
        """3x3 matrix of X -> g X g^-1 on traceless coordinates (X11, X12, X21)."""
        gi = self.inv()
        cols = []
        for E in ((1, 0, 0, -1), (0, 1, 0, 0), (0, 0, 1, 0)):
            Y = _conj(self, E, gi)
            cols.append((Y[0], Y[1], Y[2]))
        return np.array([[cols[j][i] for j in range(3)] for i in range(3)], dtype=object)

    def coord_matrix(self, chart: str) -> np.ndarray:
        """4x4 matrix of xi -> g xi g^-1 in chart coordinates."""
        T3 = self.traceless_matrix()
        T = np.zeros((4, 4), dtype=object)
        T[:] = Fraction(0)
        if chart == "dual":
            T[:3, :3] = T3
        elif chart == "source":
            # (a, b, c) = (-2 X11, X12, X21)
            D = np.array([[Fraction(-2), 0, 0], [0, 1, 0], [0, 0, 1]], dtype=object)
            Di = np.array([[Fraction(-1, 2), 0, 0], [0, 1, 0], [0, 0, 1]], dtype=object)
            T[:3, :3] = D.dot(T3).dot(Di)
        else:
            raise DomainError(chart)
        T[3, 3] = Fraction(1)
        return T

    def __repr__(self):
        return "GroupElem(" + ", ".join(str(x) for x in self.m) + ")"


def _conj(g: GroupElem, E, gi: GroupElem):
    a, b, c, d = g.m
    e, f, h, k = E
    # g E
    r = (a * e + b * h, a * f + b * k, c * e + d * h, c * f + d * k)
    A, B, C, D = gi.m
    return (r[0] * A + r[1] * C, r[0] * B + r[1] * D, r[2] * A + r[3] * C, r[2] * B + r[3] * D)


def n(x) -> GroupElem:
    return GroupElem((1, x, 0, 1))


def nprime(x) -> GroupElem:
    return GroupElem((1, 0, x, 1))


def a(y) -> GroupElem:
    return GroupElem((y, 0, 0, 1))


def weyl() -> GroupElem:
    return GroupElem((0, 1, 1, 0))


def identity() -> GroupElem:
    return GroupElem((1, 0, 0, 1))


# ------------------------------------------------------------------ grids

@dataclass(frozen=True)
class GridFnB:
    chart: str
    lo: tuple
    hi: tuple
    values: object  # CycArray (exact) or complex ndarray (float)
    p: int

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise DomainError(f"unknown chart {self.chart}")
        lo, hi = tuple(int(x) for x in self.lo), tuple(int(x) for x in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if any(h < l for l, h in zip(lo, hi)):
            raise WindowError(f"hi below lo: {lo} {hi}")
        if tuple(self.vshape) != self.widths_shape:
            raise WindowError(f"value shape {self.vshape} != {self.widths_shape}")

    # -- structure --------------------------------------------------------
    @property
    def exact(self) -> bool:
        return isinstance(self.values, CycArray)

    @property
    def vshape(self):
        return self.values.shape

    @property
    def widths(self) -> tuple:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def widths_shape(self) -> tuple:
        return tuple(self.p**w for w in self.widths)

    def cell_volume(self) -> Fraction:
        return Fraction(self.p) ** (-sum(self.hi))

    def with_values(self, values) -> "GridFnB":
        return GridFnB(self.chart, self.lo, self.hi, values, self.p)

    def coords(self, axis: int) -> list[Fraction]:
        return [Fraction(self.p) ** self.lo[axis] * i for i in range(self.p ** self.widths[axis])]

    def __repr__(self):
        return f"GridFnB({self.chart}, lo={self.lo}, hi={self.hi}, exact={self.exact})"

    # -- windows ----------------------------------------------------------
    def refine(self, lo2, hi2) -> "GridFnB":
        """Re-express on windows with larger support and finer smoothness."""
        lo2, hi2 = tuple(lo2), tuple(hi2)
        if any(l2 > l for l2, l in zip(lo2, self.lo)) or any(h2 < h for h2, h in zip(hi2, self.hi)):
            raise WindowError("refine can only widen windows")
        if lo2 == self.lo and hi2 == self.hi:
            return self
        idxs = []
        masks = []
        for k in range(4):
            L2 = self.p ** (hi2[k] - lo2[k])
            i2 = np.arange(L2)
            step = self.p ** (self.lo[k] - lo2[k])
            ok = (i2 % step) == 0
            old = (i2 // step) % (self.p ** self.widths[k])
            idxs.append(old)
            masks.append(ok)
        ix = np.ix_(*idxs)
        mask = masks[0][:, None, None, None] & masks[1][None, :, None, None] & \
            masks[2][None, None, :, None] & masks[3][None, None, None, :]
        if self.exact:
            c = self.values.c[ix] * mask[..., None]
            vals = self.values.with_coeffs(c, canonical=True)
        else:
            vals = self.values[ix] * mask
        return GridFnB(self.chart, lo2, hi2, vals, self.p)

    def coarsen(self, lo2, hi2) -> "GridFnB":
        """Restrict to narrower windows, checking that nothing is lost."""
        lo2, hi2 = tuple(lo2), tuple(hi2)
        if any(l2 < l for l2, l in zip(lo2, self.lo)) or any(h2 > h for h2, h in zip(hi2, self.hi)):
            raise WindowError("coarsen can only narrow windows")
        X, S, P = self.encoded_points(lo2, hi2)
        vals = self.lookup(X, S, P)
        shape = tuple(self.p ** (h - l) for l, h in zip(lo2, hi2))
        out = GridFnB(self.chart, lo2, hi2, _reshape(vals, shape), self.p)
        if not out.refine(self.lo, self.hi).equals(self):
            raise WindowError("function is not supported/constant on the requested windows")
        return out

    # -- evaluation --------------------------------------------------------
    def encoded_points(self, lo=None, hi=None, S=None, P=None):
        """All cell representatives as residues X with coordinate X p^-S (mod p^P)."""
        lo = self.lo if lo is None else tuple(lo)
        hi = self.hi if hi is None else tuple(hi)
        if S is None:
            S = max(0, -min(min(lo), min(self.lo)))
        if P is None:
            P = S + max(max(hi), max(self.hi)) + 1
        grids = np.meshgrid(*[np.arange(self.p ** (h - l), dtype=np.int64) for l, h in zip(lo, hi)],
                            indexing="ij")
        mod = self.p**P
        X = np.stack([(g.ravel() * self.p ** (l + S)) % mod for g, l in zip(grids, lo)], axis=1)
        return X, S, P

    def cell_index(self, X: np.ndarray, S: int, P: int) -> np.ndarray:
        if any(l + S < 0 for l in self.lo):
            raise WindowError("encoding shift too small for this grid")
        if P < S + max(self.hi):
            raise PrecisionLoss("encoding precision below the grid smoothness")
        base = np.array([self.p ** (l + S) for l in self.lo], dtype=np.int64)
        wpow = np.array(self.widths_shape, dtype=np.int64)
        strides = _strides(self.widths_shape)
        X = np.asarray(X, dtype=np.int64) % (self.p**P)
        return _accel._cells_numpy(X[:, 0], X[:, 1], X[:, 2], X[:, 3], base, wpow, strides)

    def lookup(self, X: np.ndarray, S: int, P: int):
        """Values at encoded points (zero off the support)."""
        idx = self.cell_index(X, S, P)
        hit = idx >= 0
        if self.exact:
            flat = self.values.c.reshape(-1, self.values.n)
            c = np.zeros((len(idx), self.values.n), dtype=flat.dtype)
            c[hit] = flat[idx[hit]]
            return self.values.with_coeffs(c, canonical=True)
        flat = self.values.ravel()
        out = np.zeros(len(idx), dtype=complex)
        out[hit] = flat[idx[hit]]
        return out

    def at(self, coords: Sequence) -> object:
        """Value at one point given by rational coordinates."""
        S = max(0, -min(self.lo), *(-int(ord_p(x, self.p)) for x in coords if x != 0))
        P = S + max(self.hi) + 1
        X = np.array([[residue(Fraction(x) * Fraction(self.p) ** S, self.p, P) for x in coords]], dtype=np.int64)
        v = self.lookup(X, S, P)
        return v[0] if self.exact else v[0]

    # -- comparison --------------------------------------------------------
    def common(self, other: "GridFnB"):
        if self.chart != other.chart:
            raise DomainError("chart mismatch")
        lo = tuple(min(x, y) for x, y in zip(self.lo, other.lo))
        hi = tuple(max(x, y) for x, y in zip(self.hi, other.hi))
        return self.refine(lo, hi), other.refine(lo, hi)

    def equals(self, other: "GridFnB", tol: float = 1e-9) -> bool:
        x, y = self.common(other)
        if x.exact and y.exact:
            return x.values.all_equal(y.values)
        xv = x.values.to_complex() if x.exact else x.values
        yv = y.values.to_complex() if y.exact else y.values
        scale = max(1.0, float(np.abs(xv).max(initial=0)), float(np.abs(yv).max(initial=0)))
        return bool(np.all(np.abs(xv - yv) <= tol * scale))

    def to_float(self) -> "GridFnB":
        if not self.exact:
            return self
        return self.with_values(self.values.to_complex())

    def scaled(self, s) -> "GridFnB":
        if self.exact:
            return self.with_values(self.values * Fraction(s))
        return self.with_values(self.values * float(s))

    def __add__(self, other: "GridFnB") -> "GridFnB":
        x, y = self.common(other)
        return x.with_values(x.values + y.values)

    def __sub__(self, other: "GridFnB") -> "GridFnB":
        x, y = self.common(other)
        return x.with_values(x.values - y.values)

    def support_mask(self) -> np.ndarray:
        if self.exact:
            return ~self.values.is_zero()
        return np.abs(self.values) > 0

    def relabel(self, chart=None, lo=None, hi=None) -> "GridFnB":
        return GridFnB(chart or self.chart, lo or self.lo, hi or self.hi, self.values, self.p)


def _strides(shape) -> np.ndarray:
    s = np.ones(4, dtype=np.int64)
    for k in range(2, -1, -1):
        s[k] = s[k + 1] * shape[k + 1]
    return s


def _reshape(vals, shape):
    if isinstance(vals, CycArray):
        return vals.reshape(shape)
    return vals.reshape(shape)


def zero_grid(chart: str, lo, hi, p: int, K: int = 0, exact: bool = True) -> GridFnB:
    shape = tuple(p ** (h - l) for l, h in zip(lo, hi))
    vals = CycArray.zeros(shape, p, K) if exact else np.zeros(shape, dtype=complex)
    return GridFnB(chart, lo, hi, vals, p)


def indicator_lattice(chart: str, r: Sequence[int], p: int, exact: bool = True) -> GridFnB:
    """1 on prod p^r_k, windows [r_k, r_k)."""
    lo = tuple(r)
    g = zero_grid(chart, lo, lo, p, 0, exact)
    if exact:
        return g.with_values(CycArray(np.ones((1, 1, 1, 1, 1), dtype=np.int64), p, 0))
    return g.with_values(np.ones((1, 1, 1, 1), dtype=complex))


# ----------------------------------------------------------- Fourier

def fourier(phi: GridFnB, tau_ord: int = 0, tau_unit: int = 1) -> GridFnB:
    """F phi(xi) = |tau|^2 int phi(x) psi(tau <x, xi>) dx (tau = p^tau_ord * tau_unit).

    Output windows are the lattice duals shifted by -tau_ord; the result lives
    in the other chart.
    """
    p = phi.p
    if p == 2:
        raise DomainError("grid Fourier transform is implemented for odd p")
    out_chart = "dual" if phi.chart == "source" else "source"
    widths = phi.widths
    lo_out = [0] * 4
    hi_out = [0] * 4
    for k in range(4):
        j = _PAIR[k]
        lo_out[j] = -phi.hi[k] - tau_ord
        hi_out[j] = -phi.lo[k] - tau_ord
    scale = Fraction(p) ** (-sum(phi.hi)) * Fraction(p) ** (-2 * tau_ord)
    if phi.exact:
        K = max([phi.values.K] + list(widths))
        v = phi.values.lift(K)
        c = v.c
        nco = p**K
        for k in range(4):
            w = widths[k]
            if w == 0:
                continue
            s = (_SIGN[k] * tau_unit) % (p**w)
            moved = np.moveaxis(c, k, 0)
            sh = moved.shape
            res = _accel.dft_axis(np.ascontiguousarray(moved.reshape(sh[0], -1, nco)), s, w, p ** (K - w))
            c = np.moveaxis(res.reshape(sh), 0, k)
        c = np.ascontiguousarray(c.transpose(_PAIR + (4,)))
        vals = CycArray(c, p, K, v.scale * scale, v.half).minimize()
    else:
        c = phi.values
        for k in range(4):
            w = widths[k]
            if w == 0:
                continue
            L = p**w
            s = (_SIGN[k] * tau_unit) % L
            moved = np.moveaxis(c, k, 0)
            sh = moved.shape
            res = _accel.dft_axis_complex_numpy(moved.reshape(L, -1), s, L)
            c = np.moveaxis(res.reshape(sh), 0, k)
        vals = np.ascontiguousarray(c.transpose(_PAIR)) * float(scale)
    return GridFnB(out_chart, tuple(lo_out), tuple(hi_out), vals, p)


def negate_axes(phi: GridFnB, axes: Sequence[int]) -> GridFnB:
    """phi composed with x_k -> -x_k on the given axes."""
    vals = phi.values
    idx = []
    for k in range(4):
        L = phi.p ** phi.widths[k]
        i = np.arange(L)
        idx.append((-i) % L if k in axes else i)
    ix = np.ix_(*idx)
    if phi.exact:
        return phi.with_values(vals.with_coeffs(vals.c[ix], canonical=True))
    return phi.with_values(vals[ix])


def reflect(phi: GridFnB) -> GridFnB:
    """x -> phi(-x)."""
    return negate_axes(phi, (0, 1, 2, 3))


def symmetrize(phi: GridFnB) -> GridFnB:
    """(phi(x) + phi(x - tr x)) / 2; in either chart this negates the scalar coordinate."""
    other = negate_axes(phi, (3,))
    s = phi.values + other.values
    return phi.with_values(s * Fraction(1, 2) if phi.exact else s / 2)


# ----------------------------------------------------------- pullbacks

def _ord(x: Fraction, p: int):
    return ord_p(x, p) if x != 0 else None


def pullback_windows(phi: GridFnB, T: np.ndarray):
    """Windows of v -> phi(T v) from entry valuations of T and T^-1."""
    p = phi.p
    Ti = _inverse4(T)
    lo2, hi2 = [], []
    for j in range(4):
        cand = [(_ord(Ti[j][i], p)) + phi.lo[i] for i in range(4) if Ti[j][i] != 0]
        lo2.append(min(cand))
        h = [phi.hi[i] - _ord(T[i][j], p) for i in range(4) if T[i][j] != 0]
        hi2.append(max(h))
    hi2 = [max(h, l) for h, l in zip(hi2, lo2)]
    return tuple(lo2), tuple(hi2)


def _inverse4(T) -> list:
    import sympy
    M = sympy.Matrix(4, 4, lambda i, j: sympy.Rational(T[i][j].numerator, T[i][j].denominator)
                     if isinstance(T[i][j], Fraction) else sympy.Rational(T[i][j]))
    Mi = M.inv()
    return [[Fraction(int(sympy.fraction(Mi[i, j])[0]), int(sympy.fraction(Mi[i, j])[1])) for j in range(4)]
            for i in range(4)]


def pullback_linear(phi: GridFnB, T: np.ndarray, lo=None, hi=None) -> GridFnB:
    """psi(v) = phi(T v) for an invertible rational 4x4 matrix T (same chart)."""
    p = phi.p
    T = [[Fraction(T[i][j]) for j in range(4)] for i in range(4)]
    if lo is None or hi is None:
        lo_r, hi_r = pullback_windows(phi, T)
        lo = lo_r if lo is None else tuple(lo)
        hi = hi_r if hi is None else tuple(hi)
    # encoded image coordinates
    coef = [[T[i][j] * Fraction(p) ** lo[j] for j in range(4)] for i in range(4)]
    S = max([0] + [-l for l in phi.lo] + [-ord_p(coef[i][j], p) for i in range(4) for j in range(4)
                                              if coef[i][j] != 0])
    P = S + max(phi.hi) + 1
    mod = p**P
    grids = np.meshgrid(*[np.arange(p ** (h - l), dtype=np.int64) for l, h in zip(lo, hi)], indexing="ij")
    idx = [g.ravel() for g in grids]
    X = np.zeros((len(idx[0]), 4), dtype=np.int64)
    for i in range(4):
        acc = np.zeros(len(idx[0]), dtype=np.int64)
        for j in range(4):
            if coef[i][j] == 0:
                continue
            r = residue(coef[i][j] * Fraction(p) ** S, p, P)
            if r * p ** (hi[j] - lo[j]) >= INT64_SAFE:
                raise OverflowError("encoding exceeds int64")
            acc = (acc + r * idx[j]) % mod
        X[:, i] = acc
    vals = phi.lookup(X, S, P)
    shape = tuple(p ** (h - l) for l, h in zip(lo, hi))
    return GridFnB(phi.chart, tuple(lo), tuple(hi), _reshape(vals, shape), p)


def adjoint(g: GroupElem, phi: GridFnB, lo=None, hi=None) -> GridFnB:
    """(Ad(g) phi)(x) = phi(g^-1 x g)."""
    T = g.inv().coord_matrix(phi.chart)
    return pullback_linear(phi, T, lo, hi)


def scale_coords(phi: GridFnB, lam: Fraction, axes=(0, 1, 2, 3)) -> GridFnB:
    """x -> phi(lam x) on the given axes."""
    T = np.zeros((4, 4), dtype=object)
    T[:] = Fraction(0)
    for k in range(4):
        T[k, k] = Fraction(lam) if k in axes else Fraction(1)
    return pullback_linear(phi, T)


def to_chart(phi: GridFnB, chart: str) -> GridFnB:
    """Same function of the matrix, expressed in the other chart's coordinates."""
    if chart == phi.chart:
        return phi
    T = np.zeros((4, 4), dtype=object)
    T[:] = Fraction(0)
    T[1, 1] = T[2, 2] = Fraction(1)
    if chart == "dual":
        # (a, d) = (-2 alpha, delta / 2)
        T[0, 0], T[3, 3] = Fraction(-2), Fraction(1, 2)
    else:
        T[0, 0], T[3, 3] = Fraction(-1, 2), Fraction(2)
    return pullback_linear(phi, T).relabel(chart=chart)


# ------------------------------------------------------------- inner

def inner(phi1: GridFnB, phi2: GridFnB):
    """sum phi1 conj(phi2) vol(cell) on the common refinement."""
    x, y = phi1.common(phi2)
    vol = x.cell_volume()
    if x.exact and y.exact:
        return inner_sum(x.values, y.values) * vol
    xv = x.values.to_complex() if x.exact else x.values
    yv = y.values.to_complex() if y.exact else y.values
    return complex(np.vdot(yv.ravel(), xv.ravel())) * float(vol)


def integrate(phi: GridFnB):
    vol = phi.cell_volume()
    if phi.exact:
        return phi.values.sum() * vol
    return complex(phi.values.sum()) * float(vol)


# -------------------------------------------------------- source matrices

def source_matrices(X: np.ndarray, S: int, P: int, p: int):
    """Entries (x11, x12, x21, x22) * p^S mod p^P of source-chart points."""
    mod = p**P
    inv2 = pow(2, -1, mod)
    A, B, C, D = (X[:, k] % mod for k in range(4))
    half_a = (A * inv2) % mod
    return (D - half_a) % mod, B, C, (D + half_a) % mod


def heartsuit(tau_ord: int, f_eval: Callable, lo, hi, p: int, tau_unit: int = 1) -> GridFnB:
    """1_{Z_p^x}(tau det x) f([x]) on a source grid.

    f_eval(M11, M12, M21, M22, S, P) receives matrix entries scaled by p^S
    (mod p^P) for the points that pass the determinant cutoff and returns
    their values as a CycArray.
    """
    g = zero_grid("source", lo, hi, p)
    X, S, P = g.encoded_points()
    P = max(P, 2 * S + 2)
    X, S, P = g.encoded_points(S=S, P=P)
    m11, m12, m21, m22 = source_matrices(X, S, P, p)
    mod = p**P
    det = (m11 * m22 - m12 * m21) % mod
    vd = vord(det, p, P)
    # ord(det x) = vd - 2S; cutoff ord(tau det x) == 0, determined only if vd < P
    ok = (vd - 2 * S + tau_ord == 0) & (vd < P)
    vals = CycArray.zeros((len(X),), p, 0)
    if ok.any():
        sub = f_eval(m11[ok], m12[ok], m21[ok], m22[ok], S, P)
        K = sub.K
        c = np.zeros((len(X), p**K), dtype=sub.c.dtype)
        c[ok] = sub.c
        vals = CycArray(c, p, K, sub.scale, sub.half, canonical=True)
    return GridFnB("source", tuple(lo), tuple(hi), vals.reshape(g.widths_shape), p)


# ------------------------------------------------------------- Weil

def quadratic_form_grid(phi: GridFnB, space: str, S: int, P: int):
    """det (space 'B') or det of the traceless part ('B0') at cell representatives, times p^(2S)."""
    X, _, _ = phi.encoded_points(S=S, P=P)
    mod = phi.p**P
    A, B, C, D = (X[:, k] for k in range(4))
    inv4 = pow(4, -1, mod)
    if phi.chart == "source":
        q0 = (-(A * A % mod) * inv4 - B * C) % mod
        return ((D * D) % mod + q0) % mod if space == "B" else q0
    q0 = (-(A * A) - B * C) % mod
    return (((D * D) % mod) * inv4 + q0) % mod if space == "B" else q0


def weil_apply(elem: str, param, phi: GridFnB, space: str = "B", tau_ord: int = 0, tau_unit: int = 1) -> GridFnB:
    """Weil representation generators attached to psi^tau.

    elem 'n': param b, multiply by psi(tau b q(x)).
    elem 't': param a, x -> chi(a) |a|^(dim/2) phi(a x); chi is trivial on B and
              treated as an unspecified unit (set to 1) on B0.
    elem 'w': Fourier transform (gamma = 1 on B; on B0 the unspecified eighth
              root is set to 1).
    On B0 the scalar coordinate is a spectator.
    """
    p = phi.p
    axes = (0, 1, 2) if space == "B0" else (0, 1, 2, 3)
    if space not in ("B", "B0"):
        raise DomainError(space)
    if elem == "n":
        b = Fraction(param)
        if b == 0:
            return phi
        t = b * Fraction(p) ** tau_ord * tau_unit
        vt = ord_p(t, p)
        # phase constant on cells needs vt + lo_i + hi_j >= 0 for all i, j in axes
        need = [max(phi.hi[j], -vt - min(phi.lo[i] for i in axes)) if j in axes else phi.hi[j] for j in range(4)]
        psi = phi.refine(phi.lo, need)
        S = max(0, -min(psi.lo))
        P = 2 * S + max(0, -vt) + 2
        qv = quadratic_form_grid(psi, space, S, P)
        # angle of t * qv * p^(-2S)
        u = unit_part(t, p)
        e = vt - 2 * S  # t q = u * qv * p^e
        if e >= 0:
            return psi
        den = p ** (-e)
        ur = residue(u, p, -e)
        num = (qv % den) * ur % den
        K = -e
        phase = CycArray.roots(num.reshape(psi.widths_shape), p, K)
        vals = psi.values.mul(phase) if psi.exact else psi.values * phase.to_complex()
        return psi.with_values(vals)
    if elem == "t":
        lam = Fraction(param)
        va = ord_p(lam, p)
        dim = len(axes)
        out = scale_coords(phi, lam, axes)
        factor = Fraction(p) ** (-(va * dim) // 2) if (va * dim) % 2 == 0 else None
        if factor is not None:
            return out.scaled(factor)
        # |a|^(dim/2) with odd va*dim: p^(-(va*dim)/2) = p^(-(va*dim+1)/2) * sqrt(p)
        base = Fraction(p) ** (-(va * dim + 1) // 2)
        if out.exact:
            return out.with_values((out.values * base).times_sqrt_p())
        return out.with_values(out.values * float(base) * np.sqrt(p))
    if elem == "w":
        if space == "B":
            return fourier(phi, tau_ord, tau_unit)
        return partial_fourier_traceless(phi, tau_ord, tau_unit)
    raise DomainError(f"unknown Weil generator {elem}")


def partial_fourier_traceless(phi: GridFnB, tau_ord: int = 0, tau_unit: int = 1) -> GridFnB:
    """Fourier transform in the traceless coordinates only (self-dual, 3 dims)."""
    # full transform, then undo the scalar axis: F_d is a 1-D transform we invert
    full = fourier(phi, tau_ord, tau_unit)
    # The scalar axis went through psi(tau d delta) with measure |tau|^(1/2) implied
    # by the 4-dim factor |tau|^2; transform it back with the matching 1-D inverse.
    one_d = fourier_axis(full, 3, -1, tau_ord, tau_unit)
    # scalar coordinate conventions: source d <-> dual delta = 2 d
    lam = Fraction(1, 2) if full.chart == "dual" else Fraction(2)
    T = np.zeros((4, 4), dtype=object)
    T[:] = Fraction(0)
    for k in range(3):
        T[k, k] = Fraction(1)
    T[3, 3] = lam
    return pullback_linear(one_d, T)


def fourier_axis(phi: GridFnB, axis: int, sign: int, tau_ord: int = 0, tau_unit: int = 1) -> GridFnB:
    """1-D transform along one axis with character psi(sign tau x y), measure |tau|^(1/2) dx.

    Keeps the chart label; the axis window becomes the shifted dual window.
    Requires an even tau_ord for an exact measure factor.
    """
    p = phi.p
    if tau_ord % 2:
        raise DomainError("1-D transform with odd tau valuation would need sqrt(p)")
    w = phi.widths[axis]
    lo = list(phi.lo)
    hi = list(phi.hi)
    lo[axis], hi[axis] = -phi.hi[axis] - tau_ord, -phi.lo[axis] - tau_ord
    scale = Fraction(p) ** (-phi.hi[axis]) * Fraction(p) ** (-tau_ord // 2)
    if phi.exact:
        K = max(phi.values.K, w)
        v = phi.values.lift(K)
        c = v.c
        if w:
            moved = np.moveaxis(c, axis, 0)
            sh = moved.shape
            res = _accel.dft_axis(np.ascontiguousarray(moved.reshape(sh[0], -1, p**K)),
                                  (sign * tau_unit) % p**w, w, p ** (K - w))
            c = np.moveaxis(res.reshape(sh), 0, axis)
        vals = CycArray(np.ascontiguousarray(c), p, K, v.scale * scale, v.half).minimize()
    else:
        c = phi.values
        if w:
            L = p**w
            moved = np.moveaxis(c, axis, 0)
            sh = moved.shape
            res = _accel.dft_axis_complex_numpy(moved.reshape(L, -1), (sign * tau_unit) % L, L)
            c = np.moveaxis(res.reshape(sh), 0, axis)
        vals = c * float(scale)
    return GridFnB(phi.chart, tuple(lo), tuple(hi), vals, p)


# -------------------------------------------------------- K[m] smoothing

def smoothing_windows(phi: GridFnB, m: int):
    """Conservative windows for the K[m]-average of a dual-chart function."""
    lo, hi = phi.lo, phi.hi
    lo2 = [min([lo[j]] + [m + lo[i] for i in range(3) if i != j]) for j in range(3)] + [lo[3]]
    hi2 = [max([hi[j]] + [hi[i] - m for i in range(3) if i != j]) for j in range(3)] + [hi[3]]
    hi2 = [max(h, l) for h, l in zip(hi2, lo2)]
    return tuple(lo2), tuple(hi2)


def smoothing_resolution(phi: GridFnB, m: int, lo2) -> int:
    """Parameter depth r at which xi -> phi(Ad(u) xi) is constant on K[r]-cosets of u."""
    return max(m, max(phi.hi[:3]) - min(lo2[:3]))


def km_params(p: int, m: int, r: int, P: int) -> np.ndarray:
    mod = p**P
    t = np.arange(p ** (r - m), dtype=np.int64) * p**m
    zs = 1 + t
    zinv = inv_mod_array(zs, mod)
    X, Y, Z = np.meshgrid(t, t, np.arange(len(zs)), indexing="ij")
    return np.stack([X.ravel(), Y.ravel(), zs[Z.ravel()], zinv[Z.ravel()]], axis=1)


def smooth_adjoint(phi: GridFnB, m: int, r: int | None = None, lo=None, hi=None,
                   verify: bool = False, method: str = "factored") -> GridFnB:
    """phi^U(xi) = E_{u in K[m]} phi(Ad(u) xi), u = n'(x) n(y) a(z), x, y in p^m, z in 1 + p^m.

    "direct" sums over all p^(3(r-m)) parameter triples at once.  "factored"
    averages over a(z), then n(y), then n'(x), one subgroup at a time; Haar
    measure on K[m] is the product measure in these coordinates and every
    partial average is already constant on the output cells, so the two agree.
    """
    if phi.chart != "dual":
        raise DomainError("smoothing is implemented on the dual chart")
    if m < 1:
        raise DomainError("m >= 1")
    lo_r, hi_r = smoothing_windows(phi, m)
    lo = lo_r if lo is None else tuple(lo)
    hi = hi_r if hi is None else tuple(hi)
    if r is None:
        r = smoothing_resolution(phi, m, lo)
    run = _smooth_factored if method == "factored" else _smooth_at
    if method not in ("factored", "direct"):
        raise DomainError(f"unknown smoothing method {method!r}")
    out = run(phi, m, r, lo, hi)
    if verify:
        again = run(phi, m, r + 1, lo, hi)
        if not out.equals(again):
            raise PrecisionLoss(f"K[m] average not stable between depths {r} and {r + 1}")
    return out


def _smooth_factored(phi: GridFnB, m: int, r: int, lo, hi) -> GridFnB:
    p = phi.p
    S = max(0, -min(min(lo), min(phi.lo)))
    P = S + max(max(phi.hi), max(hi)) + 1
    full = km_params(p, m, r, P)
    x0 = (full[:, 1] == 0) & (full[:, 2] == 1)
    y0 = (full[:, 0] == 0) & (full[:, 2] == 1)
    z0 = (full[:, 0] == 0) & (full[:, 1] == 0)
    out = phi
    # phi^U(xi) = E_z E_y E_x phi(Ad(n'(x)) Ad(n(y)) Ad(a(z)) xi): innermost first
    for sel in (x0, y0, z0):
        out = _smooth_at(out, m, r, lo, hi, full[sel])
    return out


def _smooth_at(phi: GridFnB, m: int, r: int, lo, hi, params=None) -> GridFnB:
    p = phi.p
    S = max(0, -min(min(lo), min(phi.lo)))
    P = S + max(max(phi.hi), max(hi)) + 1
    g = zero_grid("dual", lo, hi, p)
    X, _, _ = g.encoded_points(S=S, P=P)
    if params is None:
        params = km_params(p, m, r, P)
    base = [p ** (l + S) for l in phi.lo]
    wpow = list(phi.widths_shape)
    strides = _strides(phi.widths_shape)
    count = len(params)
    if phi.exact:
        flat = phi.values.c.reshape(-1, phi.values.n)
        acc = _accel.km_average(X, params, p**P, base, wpow, strides, flat)
        vals = CycArray(acc.reshape(g.widths_shape + (phi.values.n,)), p, phi.values.K,
                        phi.values.scale / count, phi.values.half)
    else:
        flat = phi.values.reshape(-1, 1).astype(complex)
        acc = _accel.km_average(X, params, p**P, base, wpow, strides, flat)
        vals = acc.reshape(g.widths_shape) / count
    return GridFnB("dual", lo, hi, vals, p)


# ------------------------------------------------------------- dump

def dump(phi: GridFnB) -> str:
    """Flat JSON record for golden files."""
    if not phi.exact:
        raise DomainError("dump is defined for exact grids")
    v = phi.values.minimize()
    cells = []
    flat = v.c.reshape(-1, v.n)
    shape = phi.widths_shape
    for idx in range(flat.shape[0]):
        nz = np.nonzero(flat[idx])[0]
        if len(nz) == 0:
            continue
        terms = []
        for e in nz:
            fr = Fraction(int(e), v.n)
            terms.append([fr.numerator, fr.denominator, int(flat[idx, e])])
        cells.append([list(int(i) for i in np.unravel_index(idx, shape)), terms])
    rec = {"chart": phi.chart, "p": phi.p, "windows": [list(phi.lo), list(phi.hi)],
           "scale": [v.scale.numerator, v.scale.denominator], "sqrt_p": v.half, "cells": cells}
    return json.dumps(rec, sort_keys=True)


def load(text: str) -> GridFnB:
    rec = json.loads(text)
    p = rec["p"]
    lo, hi = rec["windows"]
    shape = tuple(p ** (h - l) for l, h in zip(lo, hi))
    dens = [t[1] for _, terms in rec["cells"] for t in terms] or [1]
    n = max(dens)
    K = 0
    while p**K < n:
        K += 1
    c = np.zeros(shape + (p**K,), dtype=np.int64)
    for idx, terms in rec["cells"]:
        for num, den, coef in terms:
            c[tuple(idx) + ((num * (p**K // den)) % p**K,)] += coef
    vals = CycArray(c, p, K, Fraction(*rec["scale"]), rec["sqrt_p"])
    return GridFnB(rec["chart"], tuple(lo), tuple(hi), vals, p)
