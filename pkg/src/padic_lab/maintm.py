"""Matrix calculus near the diagonal and the main-term identity.

Traceless matrices are written [alpha, beta, gamma] for
[[alpha, beta], [gamma, -alpha]].  (G/H)[m] is the set of cosets
n'(x1) n(x2) H with x1, x2 in p^m, measured by dx1 dx2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .cyclo import CycArray
from .errors import ConfigError, DomainError, PrecisionLoss
from .kernels import MicrolocalKernel, compute_phi, profile_I
from .padic import ord_p, residue, vord
from .schwartz import (GridFnB, GroupElem, a, adjoint, identity, inner, n, nprime, smooth_adjoint,
                       weyl, zero_grid)


def _abs2(p: int) -> Fraction:
    return Fraction(1, 2) if p == 2 else Fraction(1)


def _ord2(p: int) -> int:
    return 1 if p == 2 else 0


# ------------------------------------------------------------------ E0(m)

def e0m_membership(xi: Sequence, m: int, p: int) -> bool:
    """[alpha, beta, gamma] in E0(m): alpha != 0 and beta, gamma in 2 alpha p^m."""
    al, be, ga = (Fraction(x) for x in xi)
    if al == 0:
        return False
    bound = ord_p(al, p) + _ord2(p) + m
    return all(x == 0 or ord_p(x, p) >= bound for x in (be, ga))


def ad_traceless(g: GroupElem, xi: Sequence) -> tuple:
    T = g.traceless_matrix()
    v = [Fraction(x) for x in xi]
    return tuple(sum(T[i][j] * v[j] for j in range(3)) for i in range(3))


def slice_delta(phi: GridFnB, delta0: Fraction = Fraction(0)) -> GridFnB:
    """B0 function xi -> phi(delta0/2 + xi) as a dual grid with trivial delta window."""
    if phi.chart != "dual":
        raise DomainError("expects a dual-chart grid")
    lo, hi = phi.lo, phi.hi
    d = Fraction(delta0)
    if d != 0 and ord_p(d, phi.p) < lo[3]:
        idx = None
    else:
        r = Fraction(0) if d == 0 else d / Fraction(phi.p) ** lo[3]
        idx = residue(r, phi.p, phi.widths[3]) if phi.widths[3] else 0
    nlo, nhi = lo[:3] + (0,), hi[:3] + (0,)
    if idx is None:
        return zero_grid("dual", nlo, nhi, phi.p)
    v = phi.values[:, :, :, idx:idx + 1]
    return GridFnB("dual", nlo, nhi, v, phi.p)


def _check_e0m_support(phi: GridFnB, m: int) -> bool:
    """Every nonzero cell of a B0 grid lies inside E0(m)."""
    p = phi.p
    nz = np.argwhere(phi.support_mask())
    for idx in nz:
        al = Fraction(p) ** phi.lo[0] * int(idx[0])
        if al == 0 or ord_p(al, p) >= phi.hi[0]:
            return False
        bound = ord_p(al, p) + _ord2(p) + m
        for ax in (1, 2):
            x = Fraction(p) ** phi.lo[ax] * int(idx[ax])
            if phi.hi[ax] < bound:
                return False
            if x != 0 and ord_p(x, p) < bound:
                return False
    return True


def _dilation_invariant(phi: GridFnB, m: int) -> bool:
    from .schwartz import pullback_linear
    T = np.zeros((4, 4), dtype=object)
    T[:] = Fraction(0)
    u = Fraction(1 + phi.p**m)
    for k in range(3):
        T[k, k] = u
    T[3, 3] = Fraction(1)
    return pullback_linear(phi, T, phi.lo, phi.hi).equals(phi)


# ------------------------------------------------------------ K[m] average

def _point_value_avg(phi: GridFnB, xi0: Sequence, m: int, r: int):
    """Brute E over K[m] (chart n'(x) n(y) a(z), parameters mod p^r) of phi(Ad(u) xi0)."""
    from . import _accel
    from .schwartz import _strides, km_params
    p = phi.p
    pts = [Fraction(x) for x in xi0] + [Fraction(0)]
    S = max([0] + [-l for l in phi.lo] + [-ord_p(x, p) for x in pts if x != 0])
    P = S + max(phi.hi) + 1
    X = np.array([[residue(x * Fraction(p) ** S, p, P) for x in pts]], dtype=np.int64)
    params = km_params(p, m, r, P)
    base = [p ** (l + S) for l in phi.lo]
    strides = _strides(phi.widths_shape)
    if phi.exact:
        flat = phi.values.c.reshape(-1, phi.values.n)
        acc = _accel.km_average(X, params, p**P, base, list(phi.widths_shape), strides, flat)
        return CycArray(acc[0], p, phi.values.K, phi.values.scale / len(params), phi.values.half)
    flat = phi.values.reshape(-1, 1).astype(complex)
    acc = _accel.km_average(X, params, p**P, base, list(phi.widths_shape), strides, flat)
    return complex(acc[0, 0]) / len(params)


def km_average(phi: GridFnB, xi0: Sequence, m: int, check: bool = True):
    """E_{g in K[m]} phi(Ad(g) xi0) two ways: (brute, closed form).

    phi is a B0 function (dual grid, delta window [0, 0)) supported on E0(m)
    and invariant under dilation by 1 + p^m.
    """
    p = phi.p
    if check:
        if not _check_e0m_support(phi, m):
            raise DomainError("phi is not supported on E0(m)")
        if not _dilation_invariant(phi, m):
            raise DomainError("phi is not invariant under 1 + p^m dilations")
    al, be, ga = (Fraction(x) for x in xi0)
    nzs = [ord_p(x, p) for x in (al, be, ga) if x != 0]
    r = max(m, max(phi.hi[:3]) - (min(nzs) if nzs else 0)) + 1
    brute = _point_value_avg(phi, xi0, m, r)
    # closed form
    if al == 0:
        closed = phi.values.sum() * 0 if phi.exact else 0j
        return brute, closed
    A_ord = ord_p(al, p) + _ord2(p) + m
    inA = all(x == 0 or ord_p(x, p) >= A_ord for x in (be, ga))
    if not inA:
        closed = (phi.values.sum() * 0) if phi.exact else 0j
        return brute, closed
    volA = Fraction(p) ** (-A_ord)
    # int_{beta, gamma} phi([al, beta, gamma]) at the alpha cell of al
    if ord_p(al, p) < phi.lo[0]:
        integ = None
    else:
        i = residue(al / Fraction(p) ** phi.lo[0], p, phi.widths[0]) if phi.widths[0] else 0
        integ = i
    cellvol = Fraction(p) ** (-(phi.hi[1] + phi.hi[2]))
    if phi.exact:
        if integ is None:
            return brute, phi.values.sum() * 0
        s = phi.values[integ].sum() * cellvol / volA**2
        return brute, s
    if integ is None:
        return brute, 0j
    return brute, complex(phi.values[integ].sum()) * float(cellvol / volA**2)


# ------------------------------------------------------------ Hensel orbit

@dataclass
class HenselReport:
    alpha0: Fraction
    m: int
    depth: int
    domain_cells: int
    target_cells: int
    bijective: bool
    uniform: bool
    y1_y2_match: bool
    y3_printed_match: bool
    y3_corrected_match: bool

    @property
    def passed(self) -> bool:
        return self.bijective and self.uniform and self.y1_y2_match and self.y3_corrected_match


def hensel_orbit_check(alpha0, m: int, p: int, depth: int = 1) -> HenselReport:
    """(lambda, x) -> lambda Ad(n'(x2) n(x3)) [alpha0, 0, 0] on the quotient at level m + depth."""
    alpha0 = Fraction(alpha0)
    if alpha0 == 0:
        raise DomainError("alpha0 must be nonzero")
    two = Fraction(2)
    reps = [Fraction(p**m * j) for j in range(p**depth)]
    seen = {}
    y12_ok = y3p_ok = y3c_ok = True
    for x1, x2, x3 in product(reps, reps, reps):
        lam = 1 + x1
        g = nprime(x2) @ n(x3)
        al, be, ga = (lam * v for v in ad_traceless(g, (alpha0, 0, 0)))
        # target cell in [(1 + p^m) alpha0, 2 p^m alpha0, 2 p^m alpha0] modulo level R
        ta = al / alpha0 - 1
        tb = be / (two * alpha0)
        tc = ga / (two * alpha0)
        for t in (ta, tb, tc):
            if t != 0 and ord_p(t, p) < m:
                raise DomainError("image left the target box")
        cell = tuple(residue(t / Fraction(p) ** m, p, depth) for t in (ta, tb, tc))
        seen[cell] = seen.get(cell, 0) + 1
        # coordinate formulas with alpha0 = 1 scaled out
        y1, y2, y3 = ta, tb, tc
        if y1 != x1 + 2 * x2 * x3 + 2 * x1 * x2 * x3 or y2 != -x3 * (1 + x1):
            y12_ok = False
        if y3 != x2 * (1 + x1) * (1 + 2 * x3):
            y3p_ok = False
        if y3 != x2 * (1 + x1) * (1 + x2 * x3):
            y3c_ok = False
    n_dom = len(reps) ** 3
    n_tgt = p ** (3 * depth)
    bij = len(seen) == n_tgt and n_dom == n_tgt
    uniform = bij and all(v == 1 for v in seen.values())
    return HenselReport(alpha0, m, depth, n_dom, n_tgt, bij, uniform, y12_ok, y3p_ok, y3c_ok)


# ------------------------------------------------------------ N(H) geometry

def gh_coords(g: GroupElem):
    """(x1, x2) with g H = n'(x1) n(x2) H, or None when g11 = 0."""
    a_, b_, c_, d_ = g.m
    if a_ == 0:
        return None
    return c_ / a_, a_ * b_ / (a_ * d_ - b_ * c_)


def in_gh_m(g: GroupElem, m: int, p: int) -> bool:
    c = gh_coords(g)
    if c is None:
        return False
    return all(x == 0 or ord_p(x, p) >= m for x in c)


@dataclass
class NHReport:
    cond_i: bool
    cond_ii: bool
    cond_iii: bool
    witness: str | None

    @property
    def consistent(self) -> bool:
        return self.cond_i == self.cond_ii == self.cond_iii


def nh_classifier(x1, x2, m: int, p: int, taus: Sequence = (1, Fraction(1, 9), 5)) -> NHReport:
    """Three equivalent conditions on x = n'(x1) n(x2) H:
    (i) x w in (G/H)[m] for some w; (ii) Ad(x) tau in E0(m) for one tau; (iii) for all tau."""
    x = nprime(Fraction(x1)) @ n(Fraction(x2))
    witness = None
    if in_gh_m(x, m, p):
        witness = "1"
    elif in_gh_m(x @ weyl(), m, p):
        witness = "w"
    res = [e0m_membership(ad_traceless(x, (Fraction(t), 0, 0)), m, p) for t in taus]
    return NHReport(witness is not None, res[0], all(res), witness)


def gh_disjointness(m: int, p: int, R: int = 2, s: int = 1) -> tuple[int, int]:
    """(grid size, overlaps) for (G/H)[m] and (G/H)[m] w over x1, x2 in p^-s Z / p^R."""
    grid = [Fraction(k, p**s) for k in range(p ** (s + R))]
    w = weyl()
    overlaps = 0
    for x1, x2 in product(grid, grid):
        x = nprime(x1) @ n(x2)
        if in_gh_m(x, m, p) and in_gh_m(x @ w, m, p):
            overlaps += 1
    return len(grid) ** 2, overlaps


# ------------------------------------------------------------ double cosets

def _int_matrix(g: GroupElem, p: int):
    """Primitive integral representative and the valuation of its determinant."""
    v = min(ord_p(x, p) for x in g.m if x != 0)
    m = [x / Fraction(p) ** v for x in g.m]
    den = 1
    for x in m:
        den = den * x.denominator // np.gcd(den, x.denominator)
    mi = [int(x * den) for x in m]  # den is prime to p
    return mi, den, ord_p(m[0] * m[3] - m[1] * m[2], p)


def depth(g: GroupElem, p: int) -> int:
    return _int_matrix(g, p)[2]


def _km_chart(p: int, m: int, L: int):
    """Representatives of K[m] / K[L] as integer matrices n'(x) n(y) a(z) mod p^L (m >= 1)."""
    t = np.arange(p ** (L - m), dtype=np.int64) * p**m
    X, Y, Z = (v.ravel() for v in np.meshgrid(t, t, 1 + t, indexing="ij"))
    # n'(x) n(y) a(z) = [[z, y], [x z, x y + 1]]
    return np.stack([Z, Y, X * Z, X * Y + 1])


def _gl2_reps(p: int, L: int):
    """Representatives of PGL2(Z / p^L): unit determinant, first unit entry normalized to 1."""
    mod = p**L
    r = np.arange(mod, dtype=np.int64)
    A, B, C, D = (v.ravel() for v in np.meshgrid(r, r, r, r, indexing="ij"))
    det = (A * D - B * C) % mod
    ok = det % p != 0
    first_unit = np.where(A % p != 0, A, np.where(B % p != 0, B, 0))
    ok &= first_unit == 1
    return np.stack([A[ok], B[ok], C[ok], D[ok]])


def _in_Km(M: np.ndarray, p: int, m: int, P: int) -> np.ndarray:
    """Projective membership in K[m] for integer matrices (4, n) mod p^P."""
    mod = p**P
    M = M % mod
    v = vord(M, p, P).min(axis=0)
    if np.any(P - v <= m):
        raise PrecisionLoss("matrix not resolved to level m")
    N_ = (M // (p**v)[None, :]) % mod
    a_, b_, c_, d_ = N_
    return (a_ % p != 0) & (b_ % p**m == 0) & (c_ % p**m == 0) & ((d_ - a_) % p**m == 0)


def _triple(h: GroupElem, ks: np.ndarray, g: GroupElem, p: int, P: int) -> np.ndarray:
    """Integer matrices proportional to h k g for each k (columns of ks)."""
    mod = p**P
    H, hd, _ = _int_matrix(h, p)
    G, gd, _ = _int_matrix(g, p)
    k11, k12, k21, k22 = ks
    # H k
    t11 = (H[0] * k11 + H[1] * k21) % mod
    t12 = (H[0] * k12 + H[1] * k22) % mod
    t21 = (H[2] * k11 + H[3] * k21) % mod
    t22 = (H[2] * k12 + H[3] * k22) % mod
    return np.stack([(t11 * G[0] + t12 * G[2]) % mod, (t11 * G[1] + t12 * G[3]) % mod,
                     (t21 * G[0] + t22 * G[2]) % mod, (t21 * G[1] + t22 * G[3]) % mod])


def coset_count(g0: GroupElem, m: int, p: int) -> tuple[int, int]:
    """(#{k in K[m]/K[L] : g0^-1 k g0 in K[m]}, L) with L = m + depth(g0)."""
    L = m + depth(g0, p)
    ks = _km_chart(p, m, L) if m >= 1 else _gl2_reps(p, L)
    P = L + 2 * depth(g0, p) + 2
    M = _triple(_adj(g0), ks, g0, p, P)
    return int(_in_Km(M, p, m, P).sum()), L


def _adj(g: GroupElem) -> GroupElem:
    a_, b_, c_, d_ = g.m
    return GroupElem((d_, -b_, -c_, a_))


def coset_volume(g0: GroupElem, m: int, p: int) -> Fraction:
    """vol(K[m] g0 K[m]) = [K[m] : K[m] cap g0 K[m] g0^-1] vol(K[m])."""
    from .padic import vol_K_level
    c, L = coset_count(g0, m, p)
    if m >= 1:
        total = p ** (3 * (L - m))
    else:
        total = _gl2_reps(p, L).shape[1]
    index = Fraction(total, c)
    return index * vol_K_level(m, p)


def in_double_coset(g: GroupElem, g0: GroupElem, m: int, p: int) -> bool:
    """g in K[m] g0 K[m]  <=>  exists k in K[m] with g0^-1 k g in K[m]."""
    if depth(g, p) != depth(g0, p):
        return False
    L = m + depth(g, p)
    ks = _km_chart(p, m, L) if m >= 1 else _gl2_reps(p, L)
    P = L + 2 * depth(g, p) + 2
    M = _triple(_adj(g0), ks, g, p, P)
    return bool(_in_Km(M, p, m, P).any())


# ------------------------------------------------------------ observables

@dataclass
class TestObservable:
    """Psi = sum_j c_j 1_{K[m] g_j K[m]} over distinct double cosets."""
    m: int
    cosets: list  # [(coefficient, GroupElem)]
    label: str = ""

    def __post_init__(self):
        self.cosets = [(Fraction(c), g) for c, g in self.cosets]

    @classmethod
    def coset(cls, g0: GroupElem, m: int, label: str = "") -> "TestObservable":
        return cls(m, [(1, g0)], label)

    def __add__(self, other: "TestObservable") -> "TestObservable":
        if other.m != self.m:
            raise ConfigError("observables at different levels")
        return TestObservable(self.m, self.cosets + other.cosets, f"{self.label}+{other.label}")

    def scaled(self, c) -> "TestObservable":
        return TestObservable(self.m, [(Fraction(c) * x, g) for x, g in self.cosets], self.label)

    def check_distinct(self, p: int) -> bool:
        gs = [g for _, g in self.cosets]
        for i in range(len(gs)):
            for j in range(i + 1, len(gs)):
                if in_double_coset(gs[i], gs[j], self.m, p):
                    return False
        return True


def battery(m: int, p: int) -> list[TestObservable]:
    w = weyl()
    pw = Fraction(p)
    return [
        TestObservable.coset(identity(), m, "K[m]"),
        TestObservable.coset(w, m, "K[m] w K[m]"),
        TestObservable.coset(a(pw), m, "K[m] a(p) K[m]"),
        TestObservable.coset(a(pw**2), m, "K[m] a(p^2) K[m]"),
        TestObservable.coset(w @ a(pw), m, "K[m] w a(p) K[m]"),
        TestObservable.coset(n(1), m, "K[m] n(1) K[m] (off N(H))"),
    ]


# ------------------------------------------------------------ main term

def nh_decompose(g: GroupElem, m: int, p: int, rmax: int = 4):
    """(eps, r) with g in K[m] w^eps a(p^r u) K[m] for some unit u, or None off K[m] N(H) K[m]."""
    dg = depth(g, p)
    units = [u for u in range(1, p**m) if u % p] if m >= 1 else [1]
    for eps in (0, 1):
        for r in range(-dg - 1, dg + 2):
            for u in units:
                h = a(Fraction(p) ** r * u)
                if eps:
                    h = weyl() @ h
                if in_double_coset(g, h, m, p):
                    return eps, r
    return None


@dataclass
class MainTermRow:
    label: str
    lhs_brute: object
    lhs_closed: object
    rhs: Fraction
    paths_agree: bool
    passed: bool


class MainTerm:
    """Shared state (Phi, Phi^U, profile) for main-term evaluations at one (kernel, m)."""

    def __init__(self, kernel: MicrolocalKernel, m: int, widen: int = 1):
        if m < kernel.N0:
            raise ConfigError("need m >= N0")
        self.kernel, self.m, self.p = kernel, m, kernel.p
        self.phi = compute_phi(kernel, widen)
        self.phiU = smooth_adjoint(self.phi, m)
        self.I = profile_I(self.phi)
        self._pairings = {}

    def pairing_brute(self, g: GroupElem):
        """<Ad(g) phi^U, phi^U> on the grid."""
        return inner(adjoint(g, self.phiU), self.phiU)

    def pairing_closed(self, g: GroupElem):
        """Closed form from phi^U = I e e: zero off K[m] N(H) K[m]."""
        dec = nh_decompose(g, self.m, self.p)
        if dec is None:
            return self.phi.values.sum() * 0
        eps, r = dec
        key = (eps, abs(r))
        if key not in self._pairings:
            self._pairings[key] = self._closed(eps, abs(r))
        return self._pairings[key]

    def _closed(self, eps: int, r: int):
        """sum I(+-alpha, delta) conj I(alpha, delta) vol(A)^-2 q^-|r| cellvol, A = 2 alpha p^m."""
        p, m = self.p, self.m
        g = self.I.grid
        from .schwartz import negate_axes
        J = negate_axes(g, (0,)) if eps else g
        v = self.I.values2d()
        vj = J.values.reshape(v.shape)
        L = p ** g.widths[0]
        idx = np.arange(L)
        vv = vord(idx, p, g.widths[0])
        zero_cell = vv >= g.widths[0]
        ords = g.lo[0] + vv
        mn = int(ords[~zero_cell].min())
        # vol(A)^-2 = |2 alpha|^-2 q^(2m)
        w = np.where(zero_cell, 0, p ** (2 * (ords - mn))).astype(np.int64)
        prod_ = vj.mul(v.conj())
        c = prod_.c * w[:, None, None]
        tot = CycArray(c, p, prod_.K, prod_.scale, prod_.half).sum()
        factor = Fraction(p) ** (2 * mn) / _abs2(p) ** 2 * Fraction(p) ** (2 * m) * Fraction(p) ** (-r)
        return tot * (factor * Fraction(p) ** (-(g.hi[0] + g.hi[3])))

    def lhs(self, psi: TestObservable):
        zeta1 = 1 / (1 - Fraction(1, self.p))
        brute = None
        closed = None
        for c, g in psi.cosets:
            vol = coset_volume(g, psi.m, self.p)
            b = self.pairing_brute(g) * (c * vol * zeta1)
            cl = self.pairing_closed(g) * (c * vol * zeta1)
            brute = b if brute is None else brute + b
            closed = cl if closed is None else closed + cl
        return brute, closed

    def rhs(self, psi: TestObservable) -> Fraction:
        k = self.kernel
        return Fraction(k.p) ** (k.N - k.N0) / 2 * torus_volume(psi, k.p)

    def row(self, psi: TestObservable) -> MainTermRow:
        b, c = self.lhs(psi)
        r = self.rhs(psi)
        agree = b.all_equal(c)
        return MainTermRow(psi.label, b, c, r, agree, agree and b.all_equal(r))


def torus_volume(psi: TestObservable, p: int) -> Fraction:
    """int_{N(H)} Psi = sum_w int Psi(w a(y)) dy/|y|, by enumerating y classes mod (1 + p^m)."""
    m = psi.m
    units = [u for u in range(1, p**m) if u % p] if m >= 1 else [1]
    cls_vol = Fraction(1, p**m) if m >= 1 else 1 - Fraction(1, p)
    total = Fraction(0)
    for c, g0 in psi.cosets:
        K0 = depth(g0, p)
        for eps in (0, 1):
            for k in range(-K0 - 1, K0 + 2):
                for u in units:
                    h = a(Fraction(p) ** k * u)
                    if eps:
                        h = weyl() @ h
                    if in_double_coset(h, g0, m, p):
                        total += c * cls_vol
    return total


def main_term_lhs(kernel: MicrolocalKernel, psi: TestObservable, m: int):
    mt = MainTerm(kernel, m)
    return mt.lhs(psi)


def main_term_rhs(kernel: MicrolocalKernel, psi: TestObservable, m: int) -> Fraction:
    return Fraction(kernel.p) ** (kernel.N - kernel.N0) / 2 * torus_volume(psi, kernel.p)


# ------------------------------------------------------------ Weyl variant

@dataclass
class WeylVariantReport:
    lhs: object
    rhs_printed: object   # weight |2 alpha|^-2
    rhs_balanced: object  # weight |2 alpha|^+2
    orbit_identity_ok: bool
    printed_agrees: bool
    balanced_agrees: bool


def gh_orbit_integral(phi: GridFnB, alpha: Fraction, m: int, eps: int):
    """int_{x in (G/H)[m]} phi(Ad(x w^eps) [alpha, 0, 0]) dx1 dx2 by enumeration."""
    p = phi.p
    al = -alpha if eps else alpha
    va = ord_p(al, p)
    R = max(m, max(phi.hi[1], phi.hi[2], phi.hi[0]) - va - _ord2(p)) + 1
    t = np.arange(p ** (R - m), dtype=np.int64) * p**m
    X1, X2 = (v.ravel() for v in np.meshgrid(t, t, indexing="ij"))
    S = max([0] + [-l for l in phi.lo] + [-va])
    P = S + max(phi.hi) + 2 * R + 2
    mod = p**P
    A0 = residue(al * Fraction(p) ** S, p, P)
    x1x2 = (X1 * X2) % mod
    # alpha [1 + 2 x1 x2, -2 x2, 2 x1 (1 + x1 x2)]
    pa = (A0 * ((1 + 2 * x1x2) % mod)) % mod
    pb = (A0 * ((-2 * X2) % mod)) % mod
    pg = (A0 * ((2 * X1 * (1 + x1x2)) % mod)) % mod
    pts = np.stack([pa, pb, pg, np.zeros_like(pa)], axis=1)
    vals = phi.lookup(pts, S, P)
    vol = Fraction(1, p ** (2 * R))
    if phi.exact:
        return vals.sum() * vol
    return complex(vals.sum()) * float(vol)


def weyl_variant_check(phi: GridFnB, m: int) -> WeylVariantReport:
    """Both sides of the Weyl-integral variant for phi supported on E0(m)."""
    p = phi.p
    if not _check_e0m_support(phi, m):
        raise DomainError("phi is not supported on E0(m)")
    if not _dilation_invariant(phi, m):
        raise DomainError("phi is not invariant under 1 + p^m dilations")
    # refine alpha so that orbit values are constant on alpha cells
    need = max(phi.hi[0], max(phi.hi[1], phi.hi[2]) - m)
    g = phi.refine(phi.lo, (need,) + phi.hi[1:])
    lhs = _integrate3(g)
    rp = None
    rb = None
    orbit_ok = True
    cellvol_a = Fraction(p) ** (-g.hi[0])
    for i in range(p ** g.widths[0]):
        al = Fraction(p) ** g.lo[0] * i
        if al == 0 or ord_p(al, p) >= g.hi[0]:
            continue
        orbit = None
        for eps in (0, 1):
            o = gh_orbit_integral(g, al, m, eps)
            orbit = o if orbit is None else orbit + o
            # orbit integral = |2 alpha|^-2 int phi([+-alpha, beta, gamma])
            ai = i if not eps else (-i) % (p ** g.widths[0])
            direct = g.values[ai].sum() * (Fraction(p) ** (-(g.hi[1] + g.hi[2])))
            w2 = (_abs2(p) / Fraction(p) ** ord_p(al, p)) ** 2
            if g.exact:
                orbit_ok &= bool((o - direct * (1 / w2)).is_zero())
            else:
                orbit_ok &= abs(o - complex(direct) / float(w2)) < 1e-9
        ab = (_abs2(p) * Fraction(p) ** (-ord_p(al, p)))  # |2 alpha|
        tp = orbit * (ab ** -2 * cellvol_a / 2) if g.exact else orbit * float(ab ** -2 * cellvol_a / 2)
        tb = orbit * (ab ** 2 * cellvol_a / 2) if g.exact else orbit * float(ab ** 2 * cellvol_a / 2)
        rp = tp if rp is None else rp + tp
        rb = tb if rb is None else rb + tb
    if rp is None:
        rp = rb = lhs * 0
    if g.exact:
        pa, ba = bool((lhs - rp).is_zero()), bool((lhs - rb).is_zero())
    else:
        pa, ba = abs(lhs - rp) < 1e-9, abs(lhs - rb) < 1e-9
    return WeylVariantReport(lhs, rp, rb, orbit_ok, pa, ba)


def _integrate3(phi: GridFnB):
    vol = Fraction(phi.p) ** (-(phi.hi[0] + phi.hi[1] + phi.hi[2]))
    if phi.exact:
        return phi.values.sum() * vol
    return complex(phi.values.sum()) * float(vol)
