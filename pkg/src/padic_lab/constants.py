"""Global constants over F = Q for a quaternion algebra ramified at {inf, D}, working place q.

Values are exact: a rational times an integer power of pi^2.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .characters import sigma_classes
from .errors import ConfigError
from .padic import is_prime, vol_K, vol_additive


@dataclass(frozen=True)
class SymbolicReal:
    coef: Fraction
    k: int = 0  # power of pi^2

    @classmethod
    def of(cls, x) -> "SymbolicReal":
        return x if isinstance(x, SymbolicReal) else cls(Fraction(x), 0)

    def __mul__(self, o):
        o = SymbolicReal.of(o)
        return SymbolicReal(self.coef * o.coef, self.k + o.k if self.coef * o.coef else 0)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = SymbolicReal.of(o)
        if o.coef == 0:
            raise ZeroDivisionError("SymbolicReal division by zero")
        return SymbolicReal(self.coef / o.coef, self.k - o.k if self.coef else 0)

    def __rtruediv__(self, o):
        return SymbolicReal.of(o) / self

    def __pow__(self, n: int):
        return SymbolicReal(self.coef**n, self.k * n)

    def __add__(self, o):
        o = SymbolicReal.of(o)
        if o.coef == 0:
            return self
        if self.coef == 0:
            return o
        if o.k != self.k:
            raise TypeError("cannot add different powers of pi^2 exactly")
        return SymbolicReal(self.coef + o.coef, self.k)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicReal(-self.coef, self.k)

    def __sub__(self, o):
        return self + (-SymbolicReal.of(o))

    def __eq__(self, o):
        o = SymbolicReal.of(o) if isinstance(o, (int, Fraction, SymbolicReal)) else None
        if o is None:
            return NotImplemented
        if self.coef == 0 or o.coef == 0:
            return self.coef == o.coef
        return self.coef == o.coef and self.k == o.k

    def __hash__(self):
        return hash((self.coef, self.k if self.coef else 0))

    def __float__(self):
        return float(self.coef) * math.pi ** (2 * self.k)

    def __str__(self):
        if self.k == 0 or self.coef == 0:
            return str(self.coef)
        pw = "pi^2" if self.k == 1 else f"pi^{2 * self.k}"
        return f"{self.coef}*{pw}"

    def to_sympy(self):
        import sympy as sp
        return sp.Rational(self.coef.numerator, self.coef.denominator) * sp.pi ** (2 * self.k)


PI2 = SymbolicReal(Fraction(1), 1)
ZETA2 = PI2 / 6  # Riemann zeta(2)


def zeta_p(p: int, s: int) -> Fraction:
    return 1 / (1 - Fraction(1, p**s))


def abs_2(q: int) -> Fraction:
    return Fraction(1, 2) if q == 2 else Fraction(1)


@dataclass(frozen=True)
class GlobalConfig:
    D: int
    q: int
    N: int = 2
    N0: int = 1

    def __post_init__(self):
        if not (is_prime(self.D) and is_prime(self.q)):
            raise ConfigError("D and q must be prime")
        if self.D == self.q:
            raise ConfigError("need D != q")
        if self.N0 < 1 or self.N < self.N0:
            raise ConfigError("need 1 <= N0 <= N")

    @property
    def ram_f(self) -> tuple[int, ...]:
        return (self.D,)

    @property
    def S_finite(self) -> tuple[int, ...]:
        return (self.D, self.q)

    @property
    def t(self) -> int:
        """Finite places of S other than q."""
        return len([p for p in self.S_finite if p != self.q])

    @property
    def disc_B(self) -> int:
        return math.prod(self.ram_f)


def zeta_S(cfg: GlobalConfig, s: int = 2) -> SymbolicReal:
    """Partial zeta(2) with the Euler factors at the finite places of S removed."""
    if s != 2:
        raise ConfigError("only s = 2 is available exactly")
    out = ZETA2
    for p in cfg.S_finite:
        out = out / zeta_p(p, 2)
    return out


def local_order_volume_ratio(q: int) -> Fraction:
    """vol(M2(o)) / vol(PGL2(o)), both measures normalized by the self-dual additive one.

    vol(GL2(o)) = |GL2(F_q)| q^-4 additively, divided by vol(o^x) = 1 - 1/q for
    the centre; cross-checked against the chart volume of PGL2(o).
    """
    gl2 = (q**2 - 1) * (q**2 - q)
    v = Fraction(gl2, q**4) / (1 - Fraction(1, q))
    assert v == vol_K(q)
    return vol_additive(0, q) ** 4 / v


# ------------------------------------------------------------ volumes

def volume_gamma_G(cfg: GlobalConfig) -> SymbolicReal:
    """nu(Gamma \\ G) / mu(K_q) = 2 zeta(2) Delta_B / (4 pi^2 prod_{p | D} zeta_p(1))."""
    den = 4 * PI2
    for p in cfg.ram_f:
        den = den * zeta_p(p, 1)
    return 2 * ZETA2 * cfg.disc_B / den


def volume_gamma_G_example(cfg: GlobalConfig) -> SymbolicReal:
    return SymbolicReal(Fraction(cfg.D - 1, 12))


# ------------------------------------------------------------ family size

def family_size_general(cfg: GlobalConfig) -> SymbolicReal:
    q = cfg.q
    return volume_gamma_G(cfg) * abs_2(q) / (zeta_p(q, 1) * zeta_p(q, 2))


def family_size_example(cfg: GlobalConfig) -> SymbolicReal:
    q = cfg.q
    half = Fraction(1, 2) if q == 2 else 1
    v = Fraction(cfg.D - 1, 12) * (1 - Fraction(1, q)) * (1 - Fraction(1, q**2)) * half
    return SymbolicReal(v)


def family_size_constant(cfg: GlobalConfig) -> SymbolicReal:
    """c with |family| ~ c q^(2N); both evaluation paths must coincide."""
    g, e = family_size_general(cfg), family_size_example(cfg)
    if g != e:
        raise AssertionError(f"family constant paths disagree: {g} vs {e}")
    return g


# ------------------------------------------------------------ c0

def c0_general(cfg: GlobalConfig) -> SymbolicReal:
    return (2 ** len(cfg.ram_f)) * zeta_S(cfg) / volume_gamma_G(cfg) / (2 * zeta_p(cfg.q, 1))


def c0_example(cfg: GlobalConfig) -> SymbolicReal:
    D, q = cfg.D, cfg.q
    r = Fraction(2) * 2 * (1 + Fraction(1, D)) / D * (1 - Fraction(1, q)) * (1 - Fraction(1, q**2)) / 2
    return r * PI2


def c0(cfg: GlobalConfig) -> SymbolicReal:
    g, e = c0_general(cfg), c0_example(cfg)
    if g != e:
        raise AssertionError(f"c0 paths disagree: {g} vs {e}")
    return g


# ------------------------------------------------------------ c1..c4

TAMAGAWA_VOLUME = Fraction(2)


@dataclass
class CLedger:
    c1: SymbolicReal
    c2: SymbolicReal
    c3: SymbolicReal
    c4: SymbolicReal
    vol_PB: SymbolicReal
    relation_holds: bool

    @property
    def c4_over_c3(self) -> SymbolicReal:
        return self.c4 / self.c3


def c_ledger(cfg: GlobalConfig, w_norm, vol_PB=None) -> CLedger:
    """c1 = 2 W / zeta^S(2), c2 = prod_{p not in S} vol(R_p)/vol(K_p) W / zeta^S(2),
    c3 = zeta^S(2) / vol, c4 = 2^t zeta^S(2) / vol.

    The unramified product is zeta^S(2) by the local ratio at each p, the
    additive character being unramified outside S.  vol defaults to the
    Tamagawa volume of [PB^x].
    """
    W = SymbolicReal.of(w_norm)
    zS = zeta_S(cfg)
    vol = SymbolicReal.of(TAMAGAWA_VOLUME if vol_PB is None else vol_PB)
    # prod over p not in S of the local order/maximal compact ratio: the Euler
    # product of those ratios over all p is zeta(2), then strip the S-factors
    unram_prod = ZETA2
    for p in cfg.S_finite:
        unram_prod = unram_prod / local_order_volume_ratio(p)
    c1 = 2 * W / zS
    c2 = unram_prod * W / zS
    c3 = zS / vol
    c4 = (2**cfg.t) * zS / vol
    return CLedger(c1, c2, c3, c4, vol, c2 / c1 == c3)


def sigma_cardinality(cfg: GlobalConfig) -> int:
    """|Sigma| by enumerating restriction classes (odd q)."""
    return len(sigma_classes(cfg.q, cfg.N0))


def sigma_cardinality_formula(cfg: GlobalConfig) -> Fraction:
    return Fraction(cfg.q**cfg.N0) / zeta_p(cfg.q, 1)


@dataclass
class IdentityCheck:
    lhs: SymbolicReal
    rhs: SymbolicReal

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def c4_c0_identity(cfg: GlobalConfig) -> IdentityCheck:
    """c4 q^(N - N0) / 2 against q^N |Sigma|^-1 c0, with [PB^x] in the quotient measure of vol(X)."""
    led = c_ledger(cfg, 1, vol_PB=volume_gamma_G(cfg))
    lhs = led.c4 * Fraction(cfg.q) ** (cfg.N - cfg.N0) / 2
    size = sigma_cardinality(cfg) if cfg.q > 2 else sigma_cardinality_formula(cfg)
    rhs = Fraction(cfg.q**cfg.N) / Fraction(size) * c0(cfg)
    return IdentityCheck(lhs, rhs)


# ------------------------------------------------------------ tables

def constants_row(cfg: GlobalConfig) -> dict:
    led = c_ledger(cfg, 1)
    return {
        "D": cfg.D, "q": cfg.q, "N": cfg.N, "N0": cfg.N0,
        "vol_Gamma_G": str(volume_gamma_G(cfg)),
        "family_c": str(family_size_constant(cfg)),
        "c0": str(c0(cfg)),
        "c1/W": str(led.c1), "c2/W": str(led.c2), "c3": str(led.c3), "c4": str(led.c4),
        "c1^-1 c2 = c3": led.relation_holds,
        "c4 identity": c4_c0_identity(cfg).holds,
    }


def constants_table(cfgs, fmt: str = "markdown") -> str:
    rows = [constants_row(c) for c in cfgs]
    if fmt == "json":
        return json.dumps(rows, indent=2)
    keys = list(rows[0])
    lines = ["| " + " | ".join(keys) + " |", "|" + "---|" * len(keys)]
    lines += ["| " + " | ".join(str(r[k]) for k in keys) + " |" for r in rows]
    return "\n".join(lines)
