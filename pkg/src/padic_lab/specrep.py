"""Unramified representations of PGL2 over a p-adic field with residue field of size q.

Exact values are sympy expressions; the series checks run in floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from .errors import DomainError, PoleError
from .padic import cartan_coset_volume, ord_p, vol_K, vol_multiplicative
from .schwartz import GroupElem


# ------------------------------------------------------------ Satake parameters

@dataclass(frozen=True)
class SatakeParams:
    """Unordered pair {alpha, beta} with alpha beta = 1."""
    alpha: sp.Expr
    beta: sp.Expr

    def __post_init__(self):
        if sp.simplify(self.alpha * self.beta - 1) != 0:
            raise DomainError("Satake parameters must satisfy alpha beta = 1")

    @classmethod
    def tempered(cls, theta_over_pi) -> "SatakeParams":
        """alpha = exp(i pi theta), beta = exp(-i pi theta)."""
        t = sp.Rational(Fraction(theta_over_pi).numerator, Fraction(theta_over_pi).denominator)
        return cls(sp.exp(sp.I * sp.pi * t), sp.exp(-sp.I * sp.pi * t))

    @classmethod
    def real(cls, t) -> "SatakeParams":
        t = sp.sympify(t)
        if t == 0:
            raise DomainError("t must be nonzero")
        return cls(t, 1 / t)

    def swapped(self) -> "SatakeParams":
        return SatakeParams(self.beta, self.alpha)

    @property
    def degenerate(self) -> bool:
        return sp.simplify(self.alpha - self.beta) == 0

    def as_complex(self) -> tuple[complex, complex]:
        return complex(sp.N(self.alpha, 30)), complex(sp.N(self.beta, 30))

    def unitary_class(self, q: int) -> str | None:
        """'tempered', 'complementary' or None (not unitary)."""
        a, b = self.as_complex()
        if abs(abs(a) - 1) < 1e-12 and abs(abs(b) - 1) < 1e-12:
            return "tempered"
        if abs(a.imag) < 1e-12 and abs(b.imag) < 1e-12 and max(abs(a), abs(b)) < math.sqrt(q):
            return "complementary"
        return None


def sym_equal(x, y, digits: int = 50) -> bool:
    """Exact equality when sympy can decide it, else agreement to `digits` digits."""
    d = sp.sympify(x) - sp.sympify(y)
    if sp.simplify(sp.expand_complex(d).rewrite(sp.cos)) == 0:
        return True
    return abs(complex(sp.N(d, digits))) < 10 ** (-(digits - 10))


def _n_of(y, q: int) -> int:
    y = Fraction(y)
    if y == 0:
        raise DomainError("y must be nonzero")
    return ord_p(y, q)


def _complete_h(s: SatakeParams, n: int) -> sp.Expr:
    """sum_{i + j = n} alpha^i beta^j."""
    return sp.Add(*[s.alpha**i * s.beta ** (n - i) for i in range(n + 1)])


def _sqrtq_pow(e: int, q: int) -> tuple[Fraction, Fraction]:
    """q^(e/2) as a + b sqrt(q)."""
    if e % 2 == 0:
        return Fraction(q) ** (e // 2), Fraction(0)
    return Fraction(0), Fraction(q) ** ((e - 1) // 2)


@dataclass
class SatakePoly:
    """Laurent polynomial in alpha (beta = 1/alpha) with coefficients in Q(sqrt q)."""
    q: int
    terms: dict  # exponent -> (a, b) meaning a + b sqrt(q)

    def add_term(self, k: int, c: tuple[Fraction, Fraction]) -> None:
        a0, b0 = self.terms.get(k, (Fraction(0), Fraction(0)))
        a1, b1 = a0 + c[0], b0 + c[1]
        if a1 == 0 and b1 == 0:
            self.terms.pop(k, None)
        else:
            self.terms[k] = (a1, b1)

    def __eq__(self, o) -> bool:
        return isinstance(o, SatakePoly) and self.q == o.q and self.terms == o.terms

    def evaluate(self, s: SatakeParams) -> sp.Expr:
        r = sp.sqrt(sp.Integer(self.q))
        out = sp.Integer(0)
        for k, (a, b) in sorted(self.terms.items()):
            c = sp.Rational(a.numerator, a.denominator) + sp.Rational(b.numerator, b.denominator) * r
            out += c * (s.alpha**k if k >= 0 else s.beta ** (-k))
        return out

    def to_complex(self, s: SatakeParams) -> complex:
        al, be = s.as_complex()
        r = math.sqrt(self.q)
        return sum((float(a) + float(b) * r) * (al**k if k >= 0 else be ** (-k))
                   for k, (a, b) in self.terms.items())


def whittaker_poly(n: int, q: int) -> SatakePoly:
    """|y|^(1/2) sum_{i+j=n} alpha^i beta^j at |y| = q^-n; zero for n < 0."""
    P = SatakePoly(q, {})
    if n >= 0:
        for i in range(n + 1):
            P.add_term(2 * i - n, _sqrtq_pow(-n, q))
    return P


def _primitive_hnf(q: int, a: int, d: int):
    """Upper triangular [[p^a, x], [0, p^d]], x mod p^a, with primitive entries."""
    for x in range(q**a):
        if a == 0 or d == 0 or x % q:
            yield x


def hecke_poly(n: int, q: int) -> SatakePoly:
    """lambda(T_y) from left cosets g K of the support, on the spherical vector.

    Support of T_y is the image of integral b with |nr b| = |y|; in PGL2 this
    is the primitive g with ord det g in {n, n - 2, ...}.  Left cosets have
    representatives [[p^a, x], [0, p^d]] (x mod p^a), and the normalized
    spherical vector of the induced model takes alpha^a beta^d q^((d - a)/2)
    there.  T_y = |y| vol(J)^-1 1_supp with vol(J) = vol(K).
    """
    P = SatakePoly(q, {})
    if n < 0:
        return P
    for k in range(n // 2 + 1):
        e = n - 2 * k
        for a in range(e + 1):
            d = e - a
            cnt = sum(1 for _ in _primitive_hnf(q, a, d))
            ca, cb = _sqrtq_pow(d - a, q)
            w = Fraction(cnt, q**n)
            P.add_term(a - d, (ca * w, cb * w))
    return P


def whittaker_value(s: SatakeParams, y, q: int) -> sp.Expr:
    """W(y) for the normalized spherical Whittaker function."""
    return whittaker_poly(_n_of(y, q), q).evaluate(s)


def whittaker_value_closed(s: SatakeParams, y, q: int, numeric: bool = False):
    """(alpha^(n+1) - beta^(n+1)) / (alpha - beta), or (n+1) alpha^n when alpha = beta."""
    n = _n_of(y, q)
    if numeric:
        if n < 0:
            return 0j
        a, b = s.as_complex()
        core = (n + 1) * a**n if abs(a - b) < 1e-12 else (a ** (n + 1) - b ** (n + 1)) / (a - b)
        return q ** (-n / 2) * core
    if n < 0:
        return sp.Integer(0)
    if s.degenerate:
        core = (n + 1) * s.alpha**n
    else:
        core = (s.alpha ** (n + 1) - s.beta ** (n + 1)) / (s.alpha - s.beta)
    return sp.Integer(q) ** sp.Rational(-n, 2) * core


def hecke_eigenvalue(s: SatakeParams, y, q: int) -> sp.Expr:
    return hecke_poly(_n_of(y, q), q).evaluate(s)


# ------------------------------------------------------------ L-factors

def _euler(c: sp.Expr, q: int, z) -> sp.Expr:
    den = 1 - c * sp.Integer(q) ** (-sp.sympify(z))
    if sp.simplify(den) == 0:
        raise PoleError(f"pole of the Euler factor at z = {z}")
    return 1 / den


def L_factors(s: SatakeParams, which: str, z, q: int) -> sp.Expr:
    if which == "standard":
        v = _euler(s.alpha, q, z) * _euler(s.beta, q, z)
    elif which == "adjoint":
        v = _euler(s.alpha / s.beta, q, z) * _euler(sp.Integer(1), q, z) * _euler(s.beta / s.alpha, q, z)
    else:
        raise DomainError(f"unknown L-factor {which!r}")
    return sp.simplify(v)


def zeta_local(q: int, z) -> sp.Expr:
    return _euler(sp.Integer(1), q, z)


# ------------------------------------------------------------ Whittaker norm

@dataclass
class SeriesReport:
    series: complex
    closed: complex
    terms: int
    tail_bound: float
    rel_error: float

    @property
    def passed(self) -> bool:
        return self.rel_error < 1e-9


def _tail(ratio: float, poly_deg: int, T: int) -> float:
    """Bound for sum_{n > T} (n+1)^poly_deg ratio^n (geometric majorant past the peak)."""
    n0 = T + 1
    first = (n0 + 1) ** poly_deg * ratio**n0
    growth = ((n0 + 2) / (n0 + 1)) ** poly_deg * ratio
    if growth >= 1:
        return math.inf
    return first / (1 - growth)


def _terms_for(ratio: float, poly_deg: int, target: float = 1e-15) -> tuple[int, float]:
    if not 0 <= ratio < 1:
        raise DomainError("series does not converge")
    T = 8
    while _tail(ratio, poly_deg, T) > target:
        T += 8
    return T, _tail(ratio, poly_deg, T)


def whittaker_norm_check(s: SatakeParams, z, q: int, terms: int | None = None) -> SeriesReport:
    """sum_n vol(p^n o^x) |W(p^n)|^2 q^(-n z) against L(ad, 1+z) / zeta(2+2z) * zeta(1+z) / zeta(1)."""
    cls = s.unitary_class(q)
    if cls is None:
        raise DomainError("parameters are not unitary")
    z = sp.nsimplify(z)
    a, b = s.as_complex()
    rho = max(abs(a), abs(b)) ** 2 / q ** (1 + float(z))
    T, tail = _terms_for(rho, 2)
    if terms is not None:
        T = terms
        tail = _tail(rho, 2, T)
    vol = float(vol_multiplicative(0, q))
    acc = 0.0
    h_prev, h = 0j, 1 + 0j  # complete homogeneous sums via h_n = (a + b) h_{n-1} - h_{n-2}
    for n in range(T + 1):
        if n == 1:
            h_prev, h = h, a + b
        elif n > 1:
            h_prev, h = h, (a + b) * h - h_prev
        acc += vol * abs(h) ** 2 * q ** (-n) * q ** (-n * float(z))
    closed = L_factors(s, "adjoint", 1 + z, q) / zeta_local(q, 2 + 2 * z) * zeta_local(q, 1 + z) / zeta_local(q, 1)
    cv = complex(sp.N(closed, 30))
    return SeriesReport(acc, cv, T, vol * tail, abs(acc - cv) / abs(cv))


def whittaker_norm_closed(s: SatakeParams, z, q: int) -> sp.Expr:
    z = sp.nsimplify(z)
    return sp.simplify(L_factors(s, "adjoint", 1 + z, q) / zeta_local(q, 2 + 2 * z)
                       * zeta_local(q, 1 + z) / zeta_local(q, 1))


# ------------------------------------------------------------ Macdonald

def macdonald_u(s: SatakeParams, q: int) -> tuple[sp.Expr, sp.Expr]:
    if s.degenerate:
        raise DomainError("u-coefficients are singular at alpha = beta")
    qi = sp.Rational(1, q)
    c = 1 / (1 + qi)
    u1 = c * (1 - qi * s.beta / s.alpha) / (1 - s.beta / s.alpha)
    u2 = c * (1 - qi * s.alpha / s.beta) / (1 - s.alpha / s.beta)
    return u1, u2


def macdonald_coefficient(s: SatakeParams, m: int, q: int) -> sp.Expr:
    """<pi(a(p^m)) v, v> / <v, v> for the spherical vector."""
    if m < 0:
        m = -m  # a(p^-m) lies in K a(p^m) K
    qs = sp.sqrt(sp.Integer(q))
    if s.degenerate:
        # limit beta/alpha -> 1 of u1 t1^m + u2 t2^m
        c = 1 / (1 + sp.Rational(1, q))
        return c * (s.alpha / qs) ** m * (1 + sp.Rational(1, q) + m * (1 - sp.Rational(1, q)))
    u1, u2 = macdonald_u(s, q)
    return u1 * (s.alpha / qs) ** m + u2 * (s.beta / qs) ** m


def macdonald_u_sum(s: SatakeParams, q: int) -> sp.Expr:
    """u1 + u2, reduced as a rational function of the Satake parameters (should be 1)."""
    u1, u2 = macdonald_u(s, q)
    return sp.cancel(sp.together(u1 + u2))


def _h_poly(k: int, q: int, weight: tuple[Fraction, Fraction], P: SatakePoly) -> None:
    """Add weight * h_k to P, with h_k = sum_{i+j=k} alpha^i beta^j, h_-1 = 0, h_-2 = -1."""
    if k >= 0:
        for i in range(k + 1):
            P.add_term(2 * i - k, weight)
    elif k == -2:
        P.add_term(0, (-weight[0], -weight[1]))


def macdonald_poly(m: int, q: int) -> SatakePoly:
    """u1 t1^m + u2 t2^m as a Laurent polynomial.

    (alpha - beta/q) alpha^m - (beta - alpha/q) beta^m over alpha - beta is
    h_m - h_(m-2)/q, so the coefficient is q^(-m/2) (h_m - h_(m-2)/q) / (1 + 1/q).
    """
    m = abs(m)
    P = SatakePoly(q, {})
    a, b = _sqrtq_pow(-m, q)
    c = 1 / (1 + Fraction(1, q))
    _h_poly(m, q, (a * c, b * c), P)
    _h_poly(m - 2, q, (-a * c / q, -b * c / q), P)
    return P


def macdonald_induced_poly(m: int, q: int) -> SatakePoly:
    """E_{k in K} f(k a(p^m)) in the induced model, by counting bottom rows of k.

    The bottom row of k a(p^m) is (p^m k21, k22); with (k21, k22) uniform over
    primitive vectors mod p^m, d = min(m + ord k21, ord k22) and a = m - d,
    and f = alpha^a beta^d q^((d - a)/2).
    """
    m = abs(m)
    P = SatakePoly(q, {})
    if m == 0:
        P.add_term(0, (Fraction(1), Fraction(0)))
        return P
    counts: dict[int, int] = {}
    mod = q**m
    for c in range(mod):
        for e in range(mod):
            if c % q == 0 and e % q == 0:
                continue
            d = m if e == 0 else min(m, _ord_int(e, q))
            counts[d] = counts.get(d, 0) + 1
    total = sum(counts.values())
    for d, cnt in sorted(counts.items()):
        a_ = m - d
        ca, cb = _sqrtq_pow(d - a_, q)
        w = Fraction(cnt, total)
        P.add_term(a_ - d, (ca * w, cb * w))
    return P


def macdonald_induced(s: SatakeParams, m: int, q: int) -> sp.Expr:
    return macdonald_induced_poly(m, q).evaluate(s)


def _ord_int(x: int, q: int) -> int:
    v = 0
    while x % q == 0:
        x //= q
        v += 1
    return v


# ------------------------------------------------------------ local Rallis identity

def rallis_integral_check(s: SatakeParams, q: int, terms: int | None = None) -> SeriesReport:
    """sum_m vol(K a(p^m) K)/vol(K) q^-m <a(p^m) v, v> against L(pi, 1/2) / zeta(2)."""
    cls = s.unitary_class(q)
    if cls is None:
        raise DomainError("parameters are not unitary")
    a, b = s.as_complex()
    r = max(abs(a), abs(b)) / math.sqrt(q)
    if r >= 1:
        raise DomainError("divergent: |alpha| must be < q^(1/2)")
    T, tail = _terms_for(r, 1)
    if terms is not None:
        T = terms
        tail = _tail(r, 1, T)
    qs = math.sqrt(q)
    if s.degenerate:
        def coeff(m):
            return (a / qs) ** m * (1 + 1 / q + m * (1 - 1 / q)) / (1 + 1 / q)
    else:
        u1, u2 = (complex(sp.N(u, 30)) for u in macdonald_u(s, q))

        def coeff(m):
            return u1 * (a / qs) ** m + u2 * (b / qs) ** m
    acc = 0j
    for m in range(T + 1):
        acc += float(cartan_coset_volume(m, q)) * q ** (-m) * coeff(m)
    closed = L_factors(s, "standard", sp.Rational(1, 2), q) / zeta_local(q, 2)
    cv = complex(sp.N(closed, 30))
    # |term m| <= (1 + 1/q) U (m + 1) r^m
    U = 2.0 if s.degenerate else abs(u1) + abs(u2)
    bound = (1 + 1 / q) * U * tail
    return SeriesReport(acc, cv, T, bound, abs(acc - cv) / abs(cv))


# ------------------------------------------------------------ Hecke kernels

@dataclass(frozen=True)
class HeckeKernel:
    """T_y = |y| vol(J)^-1 on the image of {b in M2(o) : |nr b| = |y|}."""
    n: int
    q: int

    @property
    def scale(self) -> Fraction:
        return Fraction(1, self.q**self.n) / vol_K(self.q)

    def in_support(self, g: GroupElem) -> bool:
        from .maintm import _int_matrix
        _, _, dd = _int_matrix(g, self.q)
        return dd <= self.n and (self.n - dd) % 2 == 0

    def __call__(self, g: GroupElem) -> Fraction:
        return self.scale if self.in_support(g) else Fraction(0)

    def left_cosets(self, primitive_det: int | None = None) -> list[GroupElem]:
        """Representatives g K of the support (optionally one determinant valuation)."""
        out = []
        dets = [self.n - 2 * k for k in range(self.n // 2 + 1)]
        if primitive_det is not None:
            dets = [primitive_det]
        for e in dets:
            for a_ in range(e + 1):
                d = e - a_
                for x in _primitive_hnf(self.q, a_, d):
                    out.append(GroupElem((Fraction(self.q**a_), Fraction(x), Fraction(0), Fraction(self.q**d))))
        return out


def hecke_kernel(y, q: int) -> HeckeKernel:
    n = _n_of(y, q)
    if n < 0:
        raise DomainError("|y| <= 1 required")
    return HeckeKernel(n, q)
