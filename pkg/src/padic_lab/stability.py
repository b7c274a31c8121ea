"""Smoothed kernel closed form, N-stability, metaplectic normal form,
and vanishing of partial orbital integrals."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclo import CycArray
from .errors import ConfigError, DomainError
from .kernels import MicrolocalKernel, compute_phi, profile_I
from .maintm import _int_matrix
from .padic import ord_p, residue, unit_part, vord
from .schwartz import GridFnB, GroupElem, fourier, smooth_adjoint, smoothing_windows, weil_apply


# ------------------------------------------------------------ phi^U closed form

def phi_U_closed_form(kernel: MicrolocalKernel, m: int, lo=None, hi=None, widen: int = 1) -> GridFnB:
    """I(alpha, delta) e_A(beta) e_A(gamma) with A = 2 alpha p^m, on dual windows."""
    if m < kernel.N0:
        raise ConfigError("need m >= N0")
    phi = compute_phi(kernel, widen)
    lo_r, hi_r = smoothing_windows(phi, m)
    lo = lo_r if lo is None else tuple(lo)
    hi = hi_r if hi is None else tuple(hi)
    p = kernel.p
    I = profile_I(phi).grid.refine((lo[0], 0, 0, lo[3]), (hi[0], 0, 0, hi[3]))
    La, Lb, Lg = (p ** (hi[k] - lo[k]) for k in range(3))
    va = vord(np.arange(La), p, hi[0] - lo[0])
    ord_a = lo[0] + va
    live = va < hi[0] - lo[0]
    A_ord = ord_a + m  # |2| = 1 for odd p
    ob = lo[1] + vord(np.arange(Lb), p, hi[1] - lo[1])
    og = lo[2] + vord(np.arange(Lg), p, hi[2] - lo[2])
    if np.any(live & ((A_ord < lo[1]) | (A_ord < lo[2]) | (A_ord > hi[1]) | (A_ord > hi[2]))):
        raise ConfigError("windows do not resolve the balls 2 alpha p^m")
    mask = (live[:, None, None]
            & (ob[None, :, None] >= A_ord[:, None, None])
            & (og[None, None, :] >= A_ord[:, None, None]))
    # vol(A)^-2 = p^(2 A_ord): integer weights relative to the smallest live A_ord
    a0 = int(A_ord[live].min())
    w = np.where(live, p ** (2 * (A_ord - a0)).clip(min=1), 0).astype(np.int64)
    weight = mask * w[:, None, None]
    Iv = I.values.reshape(La, I.values.shape[3])
    c = weight[:, :, :, None, None] * Iv.c[:, None, None, :, :]
    vals = CycArray(c, p, Iv.K, Iv.scale * Fraction(p) ** (2 * a0), Iv.half)
    return GridFnB("dual", lo, hi, vals, p)


def stable_rescaling(phiU: GridFnB, N: int, sign: int = 1) -> GridFnB:
    """eta -> q^(sign N) phiU(delta, p^-N eta) on the traceless coordinates."""
    p = phiU.p
    lo = tuple(l + N if k < 3 else l for k, l in enumerate(phiU.lo))
    hi = tuple(h + N if k < 3 else h for k, h in enumerate(phiU.hi))
    return GridFnB("dual", lo, hi, phiU.values, p).scaled(Fraction(p) ** (sign * N))


# ------------------------------------------------------------ essential equivalence

@dataclass
class EssentialEquivalence:
    """a1 = gamma |tau|^(c/4) a2 with gamma^8 = 1."""
    gamma: complex
    c: int
    exact: bool
    holds: bool
    gamma_angle: Fraction | None = None

    def consistent_with(self, other: "EssentialEquivalence") -> bool:
        return self.holds and other.holds and self.c == other.c


def fit_equivalence(a1: GridFnB, a2: GridFnB, tau_ord: int = 0, tol: float = 1e-9) -> EssentialEquivalence:
    """Solve a1 = gamma |tau|^(c/4) a2 on the largest cell of a2 and check it on every cell."""
    p = a1.p
    x, y = a1.common(a2)
    xv = x.values.to_complex() if x.exact else np.asarray(x.values)
    yv = y.values.to_complex() if y.exact else np.asarray(y.values)
    k = int(np.argmax(np.abs(yv)))
    if abs(yv.flat[k]) == 0:
        zero = bool(np.all(np.abs(xv) <= tol))
        return EssentialEquivalence(1.0, 0, x.exact, zero)
    r = xv.flat[k] / yv.flat[k]
    if abs(r) == 0:
        return EssentialEquivalence(0j, 0, False, False)
    # |tau|^(c/4) = q^(-tau_ord c / 4)
    if tau_ord == 0:
        c = 0
        ok_mod = abs(abs(r) - 1) <= tol
    else:
        cf = -4 * math.log(abs(r), p) / tau_ord
        c = round(cf)
        ok_mod = abs(cf - c) <= 1e-6
    mod = float(p) ** (-tau_ord * c / 4)
    g = r / mod
    ok8 = abs(g**8 - 1) <= 1e-7
    ang = Fraction(round(cmath.phase(g) / (2 * math.pi) * 8) % 8, 8)
    if not (ok_mod and ok8):
        return EssentialEquivalence(g, c, False, False, ang)
    # exact check when gamma = +-1 and the modulus is a rational power of q
    if x.exact and y.exact and ang in (0, Fraction(1, 2)) and (tau_ord * c) % 4 == 0:
        factor = Fraction(p) ** (-(tau_ord * c) // 4) * (1 if ang == 0 else -1)
        holds = x.values.all_equal(y.values * factor)
        return EssentialEquivalence(g, c, True, holds, ang)
    scale = max(1.0, float(np.abs(xv).max()))
    holds = bool(np.all(np.abs(xv - g * mod * yv) <= tol * scale))
    return EssentialEquivalence(g, c, False, holds, ang)


# ------------------------------------------------------------ metaplectic normal form

def tau_decompose(tau, p: int):
    """(ord, unit residue) for tau in o^x k^x2 with unit part a square; None otherwise."""
    t = Fraction(tau)
    if t == 0:
        raise DomainError("tau must be nonzero")
    v = ord_p(t, p)
    u = residue(unit_part(t, p), p, 1)
    return v, u


def metaplectic_normal_form(kernel: MicrolocalKernel, tau, m: int, widen: int = 1):
    """Residual phi0 = q^(-N/2) (1 x rho0(t(p^-N))) Ad(e_U) rho(w) S heart^tau f.

    Returns (phi0, info).  For tau outside o^x k^x2 the first return value is
    the zero witness heart^tau f itself.  The eighth-root character value on
    the traceless part is taken to be 1; any such root is absorbed by the
    equivalence fit.
    """
    p = kernel.p
    t = Fraction(tau)
    v = ord_p(t, p)
    if v % 2:
        h = kernel.heart(widen, v, sym=True)
        if not bool(h.values.is_zero().all()):
            raise DomainError("heart^tau f should vanish for tau outside o^x k^x2")
        raise DomainError("tau not in o^x k^x2; heart^tau f = 0 verified")
    # psi^tau = psi_std(xi tau x): pass the unit part to the transform
    u = unit_part(t, p)
    unit_res = residue(u * kernel.xi, p, max(kernel.N, 1) + 2 * abs(v) + 4)
    h = kernel.heart(widen, v, sym=True)
    F = fourier(h, v, unit_res)
    phiU = smooth_adjoint(F, m)
    N = kernel.N
    out = weil_apply("t", Fraction(1, p**N), phiU, space="B0")
    # q^(-N/2)
    if N % 2 == 0:
        out = out.scaled(Fraction(1, p ** (N // 2)))
    else:
        base = Fraction(1, p ** ((N + 1) // 2))
        out = out.with_values((out.values * base).times_sqrt_p())
    return out, {"tau_ord": v, "phiU": phiU}


def zero_witness(kernel: MicrolocalKernel, tau, widen: int = 1) -> bool:
    """heart^tau f = 0 identically (tau of odd valuation)."""
    v = ord_p(Fraction(tau), kernel.p)
    return bool(kernel.heart(widen, v, sym=True).values.is_zero().all())


# ------------------------------------------------------------ orbital vanishing

def is_regular_semisimple(g: GroupElem) -> bool:
    a_, b_, c_, d_ = g.m
    return (a_ + d_) ** 2 != 4 * (a_ * d_ - b_ * c_)


def orbital_vanishing(gamma: GroupElem, U2_level: int, kernel: MicrolocalKernel):
    """E_{u in K[U2_level]} f(u^-1 gamma u), exactly.

    With u = n'(x) n(y) a(z), conjugation by a(z) (z a unit) preserves g11,
    det g and the valuations of g12, g21, so f(a(z)^-1 X a(z)) = f(X) and the
    z-average drops out.  f is bi-invariant under Z K[N], so x, y modulo
    p^(N + depth(gamma)) suffice.
    """
    if not is_regular_semisimple(gamma):
        raise DomainError("gamma is not regular semisimple")
    p, N = kernel.p, kernel.N
    if U2_level < 1:
        raise ConfigError("U2_level >= 1")
    G, _, d = _int_matrix(gamma, p)
    R = max(N + d, U2_level)
    P = R + 2 * d + N + 2
    mod = p**P
    t = np.arange(p ** (R - U2_level), dtype=np.int64) * p**U2_level
    X, Y = (v.ravel() for v in np.meshgrid(t, t, indexing="ij"))
    g11, g12, g21, g22 = (int(v) % mod for v in G)
    # n'(x)^-1 G n'(x), n'(x) = [[1, 0], [x, 1]]
    a1 = (g11 + g12 * X) % mod
    b1 = np.full_like(X, g12)
    c1 = (g21 + g22 * X - X * ((g11 + g12 * X) % mod)) % mod
    d1 = (g22 - g12 * X) % mod
    # n(y)^-1 M n(y), n(y) = [[1, y], [0, 1]]
    a2 = (a1 - Y * c1) % mod
    b2 = (a1 * Y + b1 - Y * ((Y * c1 + d1) % mod)) % mod
    c2 = c1
    d2 = (Y * c1 + d1) % mod
    vals = kernel.evaluator(a2, b2, c2, d2, 0, P)
    total = vals.sum() * Fraction(1, len(X))
    return total


def orbital_threshold(gamma: GroupElem, U2_level: int, sigma, N0: int, Ns) -> dict:
    """Value of the average for each N; the threshold is the least N after which all vanish."""
    from .kernels import build_f
    out = {}
    for N in Ns:
        out[N] = orbital_vanishing(gamma, U2_level, build_f(N, sigma, N0))
    thr = None
    for N in sorted(Ns):
        if all(bool(out[M].is_zero()) for M in Ns if M >= N):
            thr = N
            break
    return {"values": out, "threshold": thr}
