"""Additive characters, characters of Z_p^x of exact conductor, and the
partition of the conductor-N characters by their restriction to 1 + p^(N-N0).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .cyclo import CycArray, reduce_coeffs
from .errors import ConfigError, DomainError, PrecisionLoss
from .padic import KElem, frac_p, ord_p, primitive_root


# ---------------------------------------------------------------- additive

@dataclass(frozen=True)
class AdditiveChar:
    """x -> psi(tau x) with psi the standard unramified character of Q_p."""
    tau: KElem

    def angle(self, x: KElem) -> Fraction:
        y = self.tau * x
        if y.valuation is None:
            if y.depth >= 0:
                return Fraction(0)
            raise PrecisionLoss("fractional part of a shallow zero is undetermined")
        if y.valuation + y.field.M < 0:
            raise PrecisionLoss("fractional part depends on digits below the window")
        return frac_p(y.to_fraction(), y.p)

    def __call__(self, x: KElem) -> CycArray:
        return CycArray.root_of_unity(self.angle(x), self.tau.p)


def eval_additive(chi: AdditiveChar, x: KElem) -> CycArray:
    return chi(x)


# ------------------------------------------------------------ dlog tables

@lru_cache(maxsize=None)
def dlog_table(p: int, N: int) -> np.ndarray:
    """Odd p: L[u] with u = g^L mod p^N (g the smallest primitive root), -1 off units."""
    mod = p**N
    g = primitive_root(p, N)
    n = (p - 1) * p ** (N - 1)
    L = np.full(mod, -1, dtype=np.int64)
    x = 1
    for k in range(n):
        L[x] = k
        x = (x * g) % mod
    return L


@lru_cache(maxsize=None)
def dlog_table_2(N: int) -> tuple[np.ndarray, np.ndarray]:
    """p = 2: (a[u], b[u]) with u = (-1)^a 5^b mod 2^N."""
    mod = 2**N
    A = np.full(mod, -1, dtype=np.int64)
    B = np.full(mod, -1, dtype=np.int64)
    nb = 2 ** max(N - 2, 0)
    x = 1
    for b in range(nb):
        for a, s in ((0, 1), (1, -1)):
            u = (s * x) % mod
            if A[u] < 0:
                A[u], B[u] = a, b
        x = (x * 5) % mod
    return A, B


def unit_group_order(p: int, N: int) -> int:
    return (p - 1) * p ** (N - 1)


# ------------------------------------------------------------ multiplicative

@dataclass(frozen=True)
class MultChar:
    """Character of (Z/p^N)^x given by discrete-log exponents.

    Odd p: exps = (k,), omega(g^L) = exp(2 pi i k L / n), n = (p-1) p^(N-1).
    p = 2: exps = (e1, e2), omega((-1)^a 5^b) = (-1)^(a e1) exp(2 pi i e2 b / 2^(N-2)).
    """
    p: int
    N: int
    exps: tuple

    @property
    def order_modulus(self) -> int:
        """n with every value an n-th root of unity."""
        if self.p == 2:
            return max(2, 2 ** max(self.N - 2, 0)) if self.N >= 2 else 1
        return unit_group_order(self.p, self.N)

    def exponent(self, u) -> np.ndarray:
        """x with omega(u) = exp(2 pi i x / n); u must be units mod p^N."""
        u = np.asarray(u, dtype=np.int64) % (self.p**self.N)
        if self.p == 2:
            A, B = dlog_table_2(self.N)
            a, b = A[u], B[u]
            if np.any(a < 0):
                raise DomainError("argument is not a unit")
            n = self.order_modulus
            nb = 2 ** max(self.N - 2, 0)
            e1, e2 = self.exps
            return (a * e1 * (n // 2) + b * e2 * (n // nb)) % n
        L = dlog_table(self.p, self.N)[u]
        if np.any(L < 0):
            raise DomainError("argument is not a unit")
        return (L * self.exps[0]) % self.order_modulus

    def angle(self, u: int) -> Fraction:
        return Fraction(int(self.exponent(u)), self.order_modulus)

    def value_complex(self, u) -> np.ndarray:
        return np.exp(2j * np.pi * self.exponent(u) / self.order_modulus)

    def inverse(self) -> "MultChar":
        if self.p == 2:
            e1, e2 = self.exps
            return MultChar(2, self.N, (e1 % 2, (-e2) % 2 ** max(self.N - 2, 0) if self.N >= 3 else 0))
        return MultChar(self.p, self.N, ((-self.exps[0]) % self.order_modulus,))

    def conductor(self) -> int:
        """Smallest c with omega trivial on 1 + p^c, by direct evaluation."""
        p, N = self.p, self.N
        mod = p**N
        for c in range(0, N + 1):
            if c == 0:
                us = np.array([u for u in range(1, mod) if u % p], dtype=np.int64)
            else:
                us = (1 + p**c * np.arange(p ** (N - c))) % mod
            if not np.any(self.exponent(us) % self.order_modulus):
                return c
        return N

    def is_trivial_on(self, c: int) -> bool:
        p, N = self.p, self.N
        us = (1 + p**c * np.arange(p ** max(N - c, 0))) % p**N
        return not np.any(self.exponent(us))

    def lift_level(self, N2: int) -> "MultChar":
        """Same character viewed modulo p^N2 (N2 >= N); odd p only."""
        if self.p == 2:
            raise DomainError("level change implemented for odd p")
        if N2 < self.N:
            raise DomainError("cannot lower the level")
        g2 = primitive_root(self.p, N2)
        L = int(dlog_table(self.p, self.N)[g2 % self.p**self.N])
        n2 = unit_group_order(self.p, N2)
        n = self.order_modulus
        # omega(g2^t) = exp(2 pi i k L t / n) = exp(2 pi i (k L n2/n) t / n2)
        return MultChar(self.p, N2, ((self.exps[0] * L * (n2 // n)) % n2,))


def enumerate_XN(p: int, N: int) -> list[MultChar]:
    """All characters of Z_p^x of exact conductor N, lexicographic in exponents."""
    if N < 2:
        raise ConfigError("enumeration of X_N requires N >= 2")
    out = []
    if p == 2:
        nb = 2 ** (N - 2)
        for e1 in range(2):
            for e2 in range(nb):
                chi = MultChar(2, N, (e1, e2))
                ok = (e2 % 2 == 1) if N >= 3 else (e1 == 1)
                if ok:
                    out.append(chi)
        return out
    n = unit_group_order(p, N)
    for k in range(n):
        if k % p:
            out.append(MultChar(p, N, (k,)))
    return out


# ------------------------------------------------------------ sigma classes

def check_N_N0(p: int, N: int, N0: int) -> None:
    ord2 = 1 if p == 2 else 0
    if not (N > N0 > ord2 and N >= 2 * N0 + ord2):
        raise ConfigError(f"need N > N0 > ord2 and N >= 2 N0 + ord2 (got N={N}, N0={N0}, p={p})")


@dataclass(frozen=True, order=True)
class SigmaClass:
    """Restriction of an unramified character to p^-N0 Z_p / Z_p, t -> psi(xi t)."""
    p: int
    N0: int
    xi: int

    def __post_init__(self):
        if self.xi % self.p == 0:
            raise DomainError("sigma exponent must be a unit")
        object.__setattr__(self, "xi", self.xi % self.p**self.N0)

    def angle(self, t: Fraction) -> Fraction:
        t = Fraction(t)
        if ord_p(t, self.p) < -self.N0:
            raise DomainError("sigma is defined on p^-N0 Z_p")
        return frac_p(self.xi * t, self.p)


def sigma_classes(p: int, N0: int) -> list[SigmaClass]:
    return [SigmaClass(p, N0, xi) for xi in range(1, p**N0) if xi % p]


def iota(u: int, N: int, N0: int, p: int) -> Fraction:
    """u in 1 + p^(N-N0) (mod p^N)  ->  p^-N (u - 1) mod Z_p."""
    check_N_N0(p, N, N0)
    u = int(u) % p**N
    if (u - 1) % p ** (N - N0):
        raise DomainError(f"{u} is not in 1 + p^{N - N0}")
    return Fraction((u - 1) % p**N, p**N)


def omega_sigma(sigma: SigmaClass, N: int, N0: int):
    """Angle function u -> angle of sigma(iota(u)) on 1 + p^(N-N0)."""
    check_N_N0(sigma.p, N, N0)

    def angle(u: int) -> Fraction:
        return sigma.angle(iota(u, N, N0, sigma.p))

    return angle


def small_units(p: int, N: int, N0: int) -> np.ndarray:
    """Representatives of (1 + p^(N-N0)) / (1 + p^N)."""
    return (1 + p ** (N - N0) * np.arange(p**N0)) % p**N


def restriction_class(omega: MultChar, N0: int) -> SigmaClass | None:
    """The sigma with omega = omega_sigma on 1 + p^(N-N0), verified pointwise."""
    p, N = omega.p, omega.N
    check_N_N0(p, N, N0)
    g = (1 + p ** (N - N0)) % p**N
    a = omega.angle(g)
    xi_f = a * p**N0
    if xi_f.denominator != 1 or int(xi_f) % p == 0:
        return None
    sig = SigmaClass(p, N0, int(xi_f))
    osig = omega_sigma(sig, N, N0)
    for u in small_units(p, N, N0):
        if omega.angle(int(u)) != osig(int(u)):
            return None
    return sig


def partition_XN(p: int, N: int, N0: int) -> dict[SigmaClass, list[MultChar]]:
    check_N_N0(p, N, N0)
    blocks: dict[SigmaClass, list[MultChar]] = {s: [] for s in sigma_classes(p, N0)}
    for om in enumerate_XN(p, N):
        s = restriction_class(om, N0)
        if s is None:
            raise DomainError(f"{om} restricts to no sigma class")
        blocks[s].append(om)
    return blocks


def block(p: int, N: int, N0: int, xi: int) -> list[MultChar]:
    return partition_XN(p, N, N0)[SigmaClass(p, N0, xi)]


# ------------------------------------------------------------ character sums

def _reduce_cyclotomic_axis(T: np.ndarray, m: int, axis: int) -> np.ndarray:
    """Reduce the exponent axis (length m) modulo Phi_m; rows >= phi(m) become zero."""
    if m <= 2:
        if m == 2:
            T = np.moveaxis(T, axis, 0).copy()
            T[0] -= T[1]
            T[1] = 0
            return np.moveaxis(T, 0, axis)
        return T
    poly = sympy.Poly(sympy.cyclotomic_poly(m, sympy.Symbol("x")))
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]  # low to high, monic
    deg = len(coeffs) - 1
    T = np.moveaxis(T, axis, 0).copy()
    for t in range(m - 1, deg - 1, -1):
        row = T[t].copy()
        if not row.any():
            continue
        # x^t = -sum_{j<deg} c_j x^(t-deg+j)
        for j in range(deg):
            T[t - deg + j] -= coeffs[j] * row
        T[t] = 0
    return np.moveaxis(T, 0, axis)


def block_sum_table(p: int, N: int, N0: int, xi: int) -> CycArray:
    """S[L] = sum over omega in the sigma-block of omega(g^L), exact, for L mod n.

    Values a priori lie in Q(zeta_n), n = (p-1) p^(N-1); the tame component is
    reduced modulo Phi_(p-1) and must vanish, which is checked.
    """
    if p == 2:
        raise DomainError("character sum tables are implemented for odd p")
    chars = block(p, N, N0, xi)
    n = unit_group_order(p, N)
    m, w = p - 1, p ** (N - 1)
    # 1/n = A/m + B/w
    A = pow(w, -1, m) if m > 1 else 0
    B = pow(m, -1, w)
    T = np.zeros((n, m, w), dtype=np.int64)
    Ls = np.arange(n)
    for om in chars:
        x = (Ls * om.exps[0]) % n
        np.add.at(T, (Ls, (x * A) % m if m > 1 else 0, (x * B) % w), 1)
    T = _reduce_cyclotomic_axis(T, m, axis=1)
    T = reduce_coeffs(T, p, N - 1)
    if np.any(T[:, 1:, :]):
        raise DomainError("character sum has a nonzero tame component")
    return CycArray(T[:, 0, :], p, N - 1, canonical=True).minimize()


def sigma_count(p: int, N0: int) -> int:
    return (p - 1) * p ** (N0 - 1)


def XN_count(p: int, N: int) -> int:
    return (p - 1) ** 2 * p ** (N - 2)


def inverse_exclusion(p: int, N: int, N0: int) -> dict[SigmaClass, bool]:
    """For each block: omega in the block implies omega^-1 is not."""
    parts = partition_XN(p, N, N0)
    out = {}
    for s, chars in parts.items():
        keys = {tuple(om.exps) for om in chars}
        out[s] = all(tuple(om.inverse().exps) not in keys for om in chars)
    return out


def iota_is_isomorphism(p: int, N: int, N0: int) -> bool:
    """iota: (1 + p^(N-N0)) / (1 + p^N) -> p^-N0 Z_p / Z_p, checked on all pairs."""
    mod = p**N
    us = [int(u) for u in small_units(p, N, N0)]
    img = {u: iota(u, N, N0, p) for u in us}
    target = {Fraction(k, p**N0) for k in range(p**N0)}
    if set(img.values()) != target or len(set(img.values())) != len(us):
        return False
    for u in us:
        for v in us:
            if img[(u * v) % mod] != (img[u] + img[v]) % 1:
                return False
    return True
