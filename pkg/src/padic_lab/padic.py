"""Truncated p-adic scalars, Haar volumes and small modular helpers.

Conventions: the residue field has q = p elements, the uniformizer is p,
the additive character is unramified (trivial on the integers, nontrivial on
p^-1 Z_p), so every additive volume is normalized by vol(Z_p) = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np
import sympy

from .errors import ConfigError, DomainError, PrecisionLoss

Rational = Union[int, Fraction]

# int64 products of two residues must stay below 2**63
INT64_SAFE = 2**62


def is_prime(p: int) -> bool:
    return bool(sympy.isprime(p))


def ord_p(x: Rational, p: int) -> float | int:
    """Valuation of a rational number; +inf for zero."""
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x: Rational, p: int) -> Fraction:
    x = Fraction(x)
    return x / Fraction(p) ** ord_p(x, p)


def unit_residue(x: Rational, p: int, M: int) -> int:
    """Residue modulo p^M of the unit part of a nonzero rational."""
    u = unit_part(x, p)
    mod = p**M
    return (u.numerator * pow(u.denominator, -1, mod)) % mod


def residue(x: Rational, p: int, P: int) -> int:
    """x mod p^P for a p-integral rational x."""
    x = Fraction(x)
    if ord_p(x, p) < 0:
        raise DomainError(f"{x} is not p-integral")
    mod = p**P
    return (x.numerator * pow(x.denominator, -1, mod)) % mod


def frac_p(x: Rational, p: int) -> Fraction:
    """p-adic fractional part in [0, 1): the unique r/p^k with x - r/p^k in Z_p."""
    x = Fraction(x)
    v = ord_p(x, p)
    if v >= 0:
        return Fraction(0)
    k = -v
    mod = p**k
    # x = n / (p^k d') with d' prime to p
    d_prime = x.denominator // mod
    r = (x.numerator * pow(d_prime, -1, mod)) % mod
    return Fraction(r, mod)


def vord(X: np.ndarray, p: int, P: int) -> np.ndarray:
    """Elementwise valuation of residues modulo p^P (P for residue 0)."""
    X = np.asarray(X, dtype=np.int64) % (p**P)
    out = np.full(X.shape, P, dtype=np.int64)
    for v in range(P - 1, -1, -1):
        out[X % (p ** (v + 1)) != 0] = v
    return out


def inv_mod_array(X: np.ndarray, mod: int) -> np.ndarray:
    """Modular inverse of an array of units (entries not prime to mod give 0)."""
    X = np.asarray(X, dtype=np.int64) % mod
    flat = X.ravel()
    uniq, inv_idx = np.unique(flat, return_inverse=True)
    table = np.array([pow(int(u), -1, mod) if np.gcd(int(u), mod) == 1 else 0
                      for u in uniq], dtype=np.int64)
    return table[inv_idx].reshape(X.shape)


def mulmod(a: np.ndarray, b: np.ndarray | int, mod: int) -> np.ndarray:
    """(a*b) % mod without int64 overflow for mod < 2**31.5."""
    if mod * mod < INT64_SAFE:
        return (np.asarray(a, dtype=np.int64) * b) % mod
    # split b into 16-bit halves
    a = np.asarray(a, dtype=np.int64) % mod
    b = np.asarray(b, dtype=np.int64) % mod
    lo = b & 0xFFFF
    hi = b >> 16
    return ((((a * hi) % mod) * 65536) % mod + (a * lo) % mod) % mod


@lru_cache(maxsize=None)
def primitive_root(p: int, N: int) -> int:
    """Smallest positive generator of (Z/p^N)^x, odd p."""
    if p == 2:
        raise DomainError("(Z/2^N)^x is not cyclic for N >= 3; use generators -1, 5")
    return int(sympy.primitive_root(p**N, smallest=True)) if N > 1 else int(sympy.primitive_root(p))


@dataclass(frozen=True)
class LocalField:
    """Q_p at working precision M (digits of relative precision)."""
    p: int
    M: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ConfigError(f"p={self.p} is not prime")
        if self.M < 1:
            raise ConfigError("precision M must be positive")

    @property
    def q(self) -> int:
        return self.p

    @property
    def ord2(self) -> int:
        return 1 if self.p == 2 else 0

    def abs2(self) -> Fraction:
        return Fraction(1, 2) if self.p == 2 else Fraction(1)

    def required_precision(self, N: int, N0: int, m: int = 0) -> int:
        return N + N0 + m + self.ord2 + 2

    def check_precision(self, N: int, N0: int, m: int = 0) -> None:
        need = self.required_precision(N, N0, m)
        if self.M < need:
            raise ConfigError(f"precision M={self.M} below required {need} "
                              f"(N={N}, N0={N0}, m={m})")

    def __call__(self, x: Rational) -> "KElem":
        return KElem.from_rational(x, self)

    def zero(self, depth: int) -> "KElem":
        return KElem(self, None, 0, depth)

    def uniformizer(self) -> "KElem":
        return KElem(self, 1, 1)

    def zeta(self, s: int = 1) -> Fraction:
        """Local zeta value zeta_k(s) = (1 - q^-s)^-1 at a positive integer."""
        return 1 / (1 - Fraction(1, self.q**s))


class KElem:
    """Element p^v * u of Q_p with u known modulo p^M, or a zero sentinel.

    The zero sentinel records the depth w to which the element is known to vanish.
    """
    __slots__ = ("field", "valuation", "unit", "depth")

    def __init__(self, field: LocalField, valuation: int | None, unit: int, depth: int | None = None):
        self.field = field
        self.valuation = valuation
        if valuation is None:
            self.unit = 0
            self.depth = depth if depth is not None else valuation
            if self.depth is None:
                raise DomainError("zero sentinel needs a depth")
        else:
            mod = field.p**field.M
            unit %= mod
            if unit % field.p == 0:
                raise DomainError("unit part must be prime to p")
            self.unit = unit
            self.depth = valuation + field.M

    @classmethod
    def from_rational(cls, x: Rational, field: LocalField) -> "KElem":
        x = Fraction(x)
        if x == 0:
            raise DomainError("exact zero has no finite window; use LocalField.zero(depth)")
        return cls(field, ord_p(x, field.p), unit_residue(x, field.p, field.M))

    # -- predicates -------------------------------------------------------
    @property
    def p(self) -> int:
        return self.field.p

    def is_zero(self) -> bool:
        return self.valuation is None

    def in_ideal(self, r: int) -> bool:
        """Decide x in q^r."""
        if self.valuation is not None:
            return self.valuation >= r
        if self.depth >= r:
            return True
        raise PrecisionLoss(f"zero known only modulo p^{self.depth}; cannot decide membership in p^{r}")

    def is_unit(self) -> bool:
        if self.valuation is None:
            if self.depth >= 1:
                return False
            raise PrecisionLoss("undetermined")
        return self.valuation == 0

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "KElem") -> None:
        if other.field != self.field:
            raise DomainError("elements of different fields")

    def __neg__(self) -> "KElem":
        if self.valuation is None:
            return self
        return KElem(self.field, self.valuation, -self.unit)

    def __add__(self, other: "KElem") -> "KElem":
        if not isinstance(other, KElem):
            other = self.field(other) if other != 0 else self.field.zero(self.depth)
        self._check(other)
        p, M = self.p, self.field.M
        A = min(self.depth, other.depth)  # absolute precision of the result
        if self.valuation is None and other.valuation is None:
            return self.field.zero(A)
        if self.valuation is None or other.valuation is None:
            x = other if self.valuation is None else self
            if A < x.depth:
                raise PrecisionLoss("adding a zero of shallow depth discards digits")
            return x
        v = min(self.valuation, other.valuation)
        width = A - v
        mod = p**width
        s = (self.unit * p ** (self.valuation - v) + other.unit * p ** (other.valuation - v)) % mod
        if s == 0:
            return self.field.zero(A)
        t = 0
        while s % p == 0:
            s //= p
            t += 1
        if width - t < M:
            raise PrecisionLoss(f"cancellation of {t} leading digits below the window")
        return KElem(self.field, v + t, s)

    __radd__ = __add__

    def __sub__(self, other: "KElem") -> "KElem":
        return self + (-other)

    def __mul__(self, other) -> "KElem":
        if not isinstance(other, KElem):
            other = self.field(other)
        self._check(other)
        if self.valuation is None or other.valuation is None:
            x, z = (other, self) if self.valuation is None else (self, other)
            shift = x.valuation if x.valuation is not None else 0
            return self.field.zero(z.depth + shift)
        return KElem(self.field, self.valuation + other.valuation, self.unit * other.unit)

    __rmul__ = __mul__

    def inverse(self) -> "KElem":
        if self.valuation is None:
            raise PrecisionLoss("inverting a zero sentinel")
        mod = self.p**self.field.M
        return KElem(self.field, -self.valuation, pow(self.unit, -1, mod))

    def __truediv__(self, other) -> "KElem":
        if not isinstance(other, KElem):
            other = self.field(other)
        return self * other.inverse()

    def __eq__(self, other) -> bool:
        if not isinstance(other, KElem):
            return NotImplemented
        return (self.field == other.field and self.valuation == other.valuation
                and self.unit == other.unit and self.depth == other.depth)

    def __hash__(self):
        return hash((self.field, self.valuation, self.unit, self.depth))

    def to_fraction(self) -> Fraction:
        """Representative p^v * u with 0 <= u < p^M."""
        if self.valuation is None:
            return Fraction(0)
        return Fraction(self.p) ** self.valuation * self.unit

    def __repr__(self) -> str:
        if self.valuation is None:
            return f"KElem(0 mod p^{self.depth}, p={self.p})"
        return f"KElem(p^{self.valuation}*{self.unit}, p={self.p}, M={self.field.M})"


def abs_k(x: KElem) -> Fraction:
    if x.valuation is None:
        return Fraction(0)
    return Fraction(x.p) ** (-x.valuation)


def vol_additive(r: int, q: int) -> Fraction:
    """vol(q^r) in k."""
    return Fraction(q) ** (-r)


def vol_multiplicative(m: int, q: int) -> Fraction:
    """Volume of u(1 + q^m) under dy/|y| (all of o^x when m = 0)."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    if m == 0:
        return 1 - Fraction(1, q)
    return Fraction(1, q**m)


def cartan_coset_volume(m: int, q: int) -> Fraction:
    """vol(K a(p^m) K) / vol(K) for PGL2."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    if m == 0:
        return Fraction(1)
    return Fraction(q) ** m * (1 + Fraction(1, q))


def vol_K(q: int) -> Fraction:
    """vol(PGL2(o)) for dg = dx1 dx2 dy/|y| in the chart n'(x1) n(x2) a(y)."""
    return 1 - Fraction(1, q**2)


def vol_K_level(m: int, q: int) -> Fraction:
    """vol of the principal congruence subgroup K[m], m >= 1."""
    if m == 0:
        return vol_K(q)
    return Fraction(1, q ** (3 * m))
