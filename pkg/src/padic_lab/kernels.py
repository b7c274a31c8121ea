"""The microlocal kernel f attached to (N, sigma), its realization on B,
the Fourier kernel Phi and its (alpha, delta) profile, and the projector
check on principal series.

Throughout psi is the unramified character psi_std(xi t) with xi the
exponent of sigma, so that psi restricted to p^-N0 Z_p / Z_p is sigma.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import (MultChar, SigmaClass, block, block_sum_table, check_N_N0,
                         dlog_table, _reduce_cyclotomic_axis, unit_group_order)
from .cyclo import CycArray
from .errors import ConfigError, DomainError, ModelError, PrecisionLoss
from .padic import inv_mod_array, ord_p, residue, vord
from .schwartz import (GridFnB, GroupElem, fourier, heartsuit, negate_axes, symmetrize,
                       zero_grid)


def split_N(p: int, N: int) -> tuple[int, int]:
    ord2 = 1 if p == 2 else 0
    return N // 2 - ord2, (N + 1) // 2


def vol_J(p: int, N: int) -> Fraction:
    """|2|^-1 q^-N (1 - 1/q)."""
    abs2 = Fraction(1, 2) if p == 2 else Fraction(1)
    return Fraction(1, p**N) * (1 - Fraction(1, p)) / abs2


# --------------------------------------------------------------- f_omega

@dataclass(frozen=True)
class FOmega:
    """f_omega on PGL2: vol(J)^-1 omega(det g / g11^2) on J, else 0."""
    omega: MultChar
    N1: int
    N2: int

    @property
    def weight(self) -> Fraction:
        return 1 / vol_J(self.omega.p, self.omega.N)

    def _lift(self, g: GroupElem):
        p = self.omega.p
        v = min(ord_p(x, p) for x in g.m if x != 0)
        m = [x / Fraction(p) ** v for x in g.m]
        if ord_p(m[0] * m[3] - m[1] * m[2], p) != 0:
            return None
        if ord_p(m[0], p) != 0 or ord_p(m[3], p) != 0:
            return None
        if ord_p(m[1], p) < self.N1 or ord_p(m[2], p) < self.N2:
            return None
        return m

    def in_support(self, g: GroupElem) -> bool:
        return self._lift(g) is not None

    def angle(self, g: GroupElem) -> Fraction | None:
        """Angle of omega(det/g11^2) in [0, 1), or None off J."""
        m = self._lift(g)
        if m is None:
            return None
        p, N = self.omega.p, self.omega.N
        u = residue((m[0] * m[3] - m[1] * m[2]) / m[0] ** 2, p, N)
        return self.omega.angle(u)

    def __call__(self, g: GroupElem) -> complex:
        a = self.angle(g)
        if a is None:
            return 0j
        return float(self.weight) * complex(np.exp(2j * np.pi * float(a)))


def build_f_omega(omega: MultChar) -> FOmega:
    if omega.p == 2:
        raise DomainError("kernels are implemented for odd p")
    u = np.arange(omega.p**omega.N)
    u = u[u % omega.p != 0]
    if not np.any((2 * omega.exponent(u)) % omega.order_modulus):
        raise DomainError("omega^2 is trivial")
    N1, N2 = split_N(omega.p, omega.conductor())
    return FOmega(omega, N1, N2)


# --------------------------------------------------------------- f on grids

class KernelEvaluator:
    """Vectorized f = sum over a sigma-block of f_omega, on integer-encoded matrices."""

    def __init__(self, p: int, N: int, N0: int, xi: int):
        self.p, self.N, self.N0, self.xi = p, N, N0, xi
        self.N1, self.N2 = split_N(p, N)
        self.table = block_sum_table(p, N, N0, xi)
        self.weight = 1 / vol_J(p, N)

    def __call__(self, M11, M12, M21, M22, S: int, P: int, sym: bool = False) -> CycArray:
        p, N = self.p, self.N
        mats = np.stack([np.asarray(x, dtype=np.int64) % p**P for x in (M11, M12, M21, M22)])
        v = vord(mats, p, P).min(axis=0)
        if np.any(P - v < N + 1):
            raise PrecisionLoss("matrix entries not resolved to level N after normalization")
        prec = int((P - v).min())
        mod = p**prec
        x = (mats // (p**v)[None, :]) % mod
        x11, x12, x21, x22 = x
        if sym:
            # x - tr(x): [[-x22, x12], [x21, -x11]]
            x11, x22 = (-x22) % mod, (-x11) % mod
        det = (x11 * x22 - x12 * x21) % mod
        ok = (det % p != 0) & (x11 % p != 0) & (x22 % p != 0)
        ok &= (x12 % p**self.N1 == 0) & (x21 % p**self.N2 == 0)
        modN = p**N
        out = CycArray.zeros((len(ok),), p, self.table.K)
        if not ok.any():
            return CycArray(out.c, p, self.table.K, self.weight * self.table.scale, canonical=True)
        i11 = inv_mod_array(x11[ok] % modN, modN)
        u = (det[ok] % modN) * ((i11 * i11) % modN) % modN
        L = dlog_table(p, N)[u]
        c = out.c
        c[ok] = self.table.c[L]
        return CycArray(c, p, self.table.K, self.weight * self.table.scale, canonical=True)


def heart_windows(p: int, N: int, N0: int, widen: int = 0):
    N1, N2 = split_N(p, N)
    lo = (N - N0, N1, N2, 0)
    hi = (N + widen, N1 + widen, N2 + widen, N0 + widen)
    return lo, hi


@dataclass
class MicrolocalKernel:
    p: int
    N: int
    N0: int
    sigma: SigmaClass
    N1: int
    N2: int
    volJ: Fraction
    block_size: int
    evaluator: KernelEvaluator = field(repr=False)
    _hearts: dict = field(default_factory=dict, repr=False)

    @property
    def xi(self) -> int:
        return self.sigma.xi

    def heart(self, widen: int = 0, tau_ord: int = 0, sym: bool = False) -> GridFnB:
        """heart^tau f for tau = p^tau_ord (even tau_ord) on source windows."""
        key = (widen, tau_ord, sym)
        if key not in self._hearts:
            if tau_ord % 2:
                lo, hi = heart_windows(self.p, self.N, self.N0, widen)
                self._hearts[key] = zero_grid("source", lo, hi, self.p)
            else:
                k = tau_ord // 2
                lo, hi = heart_windows(self.p, self.N, self.N0, widen)
                lo = tuple(x - k for x in lo)
                hi = tuple(x - k for x in hi)
                h = heartsuit(tau_ord, self.evaluator, lo, hi, self.p)
                if sym:
                    # S f(g) = (f(g) + f(g - tr g)) / 2
                    h2 = heartsuit(tau_ord, lambda *a: self.evaluator(*a, sym=True), lo, hi, self.p)
                    h = h.with_values((h.values + h2.values) * Fraction(1, 2))
                self._hearts[key] = h
        return self._hearts[key]

    @property
    def heart1(self) -> GridFnB:
        return self.heart(0)

    def metadata(self) -> dict:
        return {"p": self.p, "N": self.N, "N0": self.N0, "xi": self.xi,
                "volJ": str(self.volJ), "block_size": self.block_size}


def build_f(N: int, sigma: SigmaClass, N0: int) -> MicrolocalKernel:
    p = sigma.p
    if p == 2:
        raise DomainError("kernels are implemented for odd p")
    check_N_N0(p, N, N0)
    if sigma.N0 != N0:
        raise ConfigError("sigma class level differs from N0")
    N1, N2 = split_N(p, N)
    ev = KernelEvaluator(p, N, N0, sigma.xi)
    return MicrolocalKernel(p, N, N0, sigma, N1, N2, vol_J(p, N), len(block(p, N, N0, sigma.xi)), ev)


def kernel_at(kernel: MicrolocalKernel, g: GroupElem) -> CycArray:
    """f(g) for one group element, exact."""
    p = kernel.p
    P = kernel.N + 4
    v = min(ord_p(x, p) for x in g.m if x != 0)
    m = [residue(x / Fraction(p) ** v, p, P) for x in g.m]
    return kernel.evaluator(*[np.array([x]) for x in m], 0, P)[0]


def heart_f_closed_form(N: int, sigma: SigmaClass, N0: int, lo=None, hi=None) -> GridFnB:
    """C0 1(d unit) 1(a in p^(N-N0)) 1(b in p^N1) 1(c in p^N2) psi((ad - bc) / (p^N d^2))."""
    p = sigma.p
    check_N_N0(p, N, N0)
    N1, N2 = split_N(p, N)
    tlo, thi = heart_windows(p, N, N0)
    lo = tlo if lo is None else tuple(lo)
    hi = thi if hi is None else tuple(hi)
    if any(h < t for h, t in zip(hi, thi)):
        raise ConfigError("windows too coarse for the closed form")
    if min(lo) < 0:
        raise ConfigError("closed form grid needs integral windows")
    g = zero_grid("source", lo, hi, p)
    X, _, P = g.encoded_points(S=0, P=max(max(hi), N) + 1)
    A, B, C, D = (X[:, k] for k in range(4))
    ok = (D % p != 0) & (A % p ** (N - N0) == 0) & (B % p**N1 == 0) & (C % p**N2 == 0)
    modN = p**N
    iD = inv_mod_array(np.where(ok, D, 1) % modN, modN)
    num = ((A % modN) * (D % modN) - (B % modN) * (C % modN)) % modN
    e = (num * ((iD * iD) % modN) % modN) * sigma.xi % modN
    vals = CycArray.roots(e, p, N, mask=ok)
    C0 = Fraction(p) ** (2 * N - N0)
    vals = CycArray(vals.c, p, N, C0).minimize()
    return GridFnB("source", lo, hi, vals.reshape(g.widths_shape), p)


# --------------------------------------------------------------- Phi and I

def compute_phi(kernel: MicrolocalKernel, widen: int = 1) -> GridFnB:
    """Phi = F S heart^1 f on the dual chart (psi = psi_sigma)."""
    h = kernel.heart(widen)
    return fourier(symmetrize(h), 0, kernel.xi)


@dataclass(frozen=True)
class ProfileI:
    """I(alpha, delta), carried as a dual-chart grid with trivial beta, gamma windows."""
    grid: GridFnB

    @property
    def p(self) -> int:
        return self.grid.p

    def alpha_window(self):
        return self.grid.lo[0], self.grid.hi[0]

    def delta_window(self):
        return self.grid.lo[3], self.grid.hi[3]

    def values2d(self) -> CycArray:
        v = self.grid.values
        return v.reshape(v.shape[0], v.shape[3])

    def reflected(self) -> "ProfileI":
        return ProfileI(negate_axes(self.grid, (0,)))

    def weyl_symmetric(self) -> bool:
        return self.reflected().grid.equals(self.grid)

    def rescaled(self, N: int) -> "ProfileI":
        """alpha -> q^-N I(p^-N alpha, delta)."""
        g = self.grid
        lo = (g.lo[0] + N,) + g.lo[1:]
        hi = (g.hi[0] + N,) + g.hi[1:]
        return ProfileI(GridFnB("dual", lo, hi, g.values * Fraction(1, g.p**N), g.p))

    def equals(self, other: "ProfileI") -> bool:
        return self.grid.equals(other.grid)

    def delta_support_ok(self, N0: int) -> bool:
        """I vanishes off delta in p^-N0."""
        g = self.grid
        if g.lo[3] >= -N0:
            return True
        step = g.p ** (-N0 - g.lo[3])
        idx = np.arange(g.p ** g.widths[3])
        bad = (idx % step) != 0
        nz = g.support_mask()
        return not np.any(nz[..., bad])


def profile_I(phi: GridFnB) -> ProfileI:
    if phi.chart != "dual":
        raise DomainError("profile_I expects a dual-chart grid")
    vol = Fraction(phi.p) ** (-(phi.hi[1] + phi.hi[2]))
    if phi.exact:
        s = phi.values.sum(axis=(1, 2))
        vals = s.reshape(s.shape[0], 1, 1, s.shape[1]) * vol
    else:  # complex grid
        s = phi.values.sum(axis=(1, 2))
        vals = s.reshape(s.shape[0], 1, 1, s.shape[1]) * float(vol)
    lo = (phi.lo[0], 0, 0, phi.lo[3])
    hi = (phi.hi[0], 0, 0, phi.hi[3])
    return ProfileI(GridFnB("dual", lo, hi, vals, phi.p))


def normalization_integral(I: ProfileI):
    """int |2 alpha|^-2 |I(alpha, delta)|^2 d alpha d delta, exact when I is exact."""
    g = I.grid
    p = g.p
    lo, hi = g.lo[0], g.hi[0]
    L = p ** (hi - lo)
    idx = np.arange(L)
    v = vord(idx, p, hi - lo)  # ord(alpha) = lo + v, v = hi - lo on the zero cell
    vals = I.values2d()
    cellvol = Fraction(p) ** (-(g.hi[0] + g.hi[3]))
    abs2 = Fraction(1, 2) if p == 2 else Fraction(1)
    zero_cell = v >= hi - lo
    if g.exact:
        if not np.all(vals[np.nonzero(zero_cell)[0][0]].is_zero()):
            raise DomainError("profile does not vanish near alpha = 0")
        sq = vals.mul(vals.conj())
        ords = lo + v
        mn = int(ords[~zero_cell].min()) if np.any(~zero_cell) else 0
        w = np.where(zero_cell, 0, p ** (2 * (ords - mn))).astype(np.int64)
        c = sq.c * w[:, None, None]
        tot = CycArray(c, p, sq.K, sq.scale, sq.half).sum()
        tot = tot * (Fraction(p) ** (2 * mn) / abs2**2 * cellvol)
        r = tot.rational_value()
        if r is None:
            raise DomainError("normalization integral is not rational")
        return r[()] if hasattr(r, "shape") and r.shape == () else r
    V = np.asarray(g.values).reshape(L, -1)
    if np.abs(V[zero_cell]).max(initial=0) > 1e-9:
        raise DomainError("profile does not vanish near alpha = 0")
    w = np.where(zero_cell, 0.0, float(p) ** (2.0 * (lo + v)))
    return float((w[:, None] * np.abs(V) ** 2).sum() * float(cellvol) / float(abs2) ** 2)


def expected_normalization(p: int, N: int, N0: int) -> Fraction:
    """q^(N-N0) / (2 zeta(1))."""
    return Fraction(p) ** (N - N0) * (1 - Fraction(1, p)) / 2


def phi_odd_q_closed_form(kernel: MicrolocalKernel, lo, hi, corrected: bool = False) -> GridFnB:
    """Odd q: C 1(alpha in p^-N units) 1(beta in p^-N2) 1(gamma in p^-N1)
    1(delta in p^-N0) co(delta / (p^N alpha)), co(t) = (psi(t) + psi(-t)) / 2.

    C = q^-N0 zeta(1)^-1 as commonly printed; the brute transform gives
    C = q^-N0 (corrected=True), larger by zeta(1).
    """
    p, N, N0 = kernel.p, kernel.N, kernel.N0
    g = zero_grid("dual", lo, hi, p)
    S = max(0, -min(lo), N)
    X, S, P = g.encoded_points(S=S, P=S + max(max(hi), 0) + 1)
    A, B, G, D = (X[:, k] for k in range(4))
    va = vord(A, p, P)
    ok = (va == S - N) & (vord(B, p, P) >= S - kernel.N2) & (vord(G, p, P) >= S - kernel.N1)
    ok &= vord(D, p, P) >= S - N0
    # t = delta / (p^N alpha) = D p^-S / (Au p^0) with alpha p^N = Au p^0 (Au unit)
    modS = p**S
    Au = np.where(ok, A // p ** np.where(ok, va, 0), 1) % modS
    e = ((D % modS) * inv_mod_array(Au, modS) % modS) * kernel.xi % modS
    plus = CycArray.roots(e, p, S, mask=ok)
    minus = CycArray.roots(-e, p, S, mask=ok)
    co = (plus + minus) * Fraction(1, 2)
    const = Fraction(1, p**N0) if corrected else Fraction(1, p**N0) * (1 - Fraction(1, p))
    vals = co * const
    return GridFnB("dual", lo, hi, vals.minimize().reshape(g.widths_shape), p)


def phi_support_report(phi: GridFnB, kernel: MicrolocalKernel) -> dict:
    """Check the support conditions and the unit-dilation invariance of Phi."""
    from .schwartz import pullback_linear
    p, N, N0 = kernel.p, kernel.N, kernel.N0
    nz = phi.support_mask()
    out = {}
    conds = {0: ("alpha", None), 1: ("beta", -kernel.N2), 2: ("gamma", -kernel.N1), 3: ("delta", -N0)}
    for ax, (name, bound) in conds.items():
        idx = np.arange(p ** phi.widths[ax])
        w = phi.hi[ax] - phi.lo[ax]
        ords = phi.lo[ax] + vord(idx, p, w)
        if name == "alpha":
            good = ords == -N
        else:
            good = ords >= bound
        sl = [slice(None)] * 4
        sl[ax] = ~good
        out[name] = not np.any(nz[tuple(sl)])
    T = np.zeros((4, 4), dtype=object)
    T[:] = Fraction(0)
    inv_ok = True
    for u in (1 + p**N0, 1 + 2 * p**N0, Fraction(1, 1 + p**N0)):
        for k in range(3):
            T[k, k] = Fraction(u)
        T[3, 3] = Fraction(1)
        inv_ok &= pullback_linear(phi, T, phi.lo, phi.hi).equals(phi)
    out["dilation"] = bool(inv_ok)
    return out


# --------------------------------------------------------------- projector

@dataclass
class ProjectorReport:
    rank: int
    trace: Fraction
    idempotent: bool
    self_adjoint: bool
    zero: bool
    image_transform: str | None  # "omega(a^2/nr)", "omega(nr/a^2)", or None
    image_checks: int
    dimension: int
    group_size: int


def _p1_basis(p: int, L: int):
    """Representatives (1, d) and (c, 1), c in p Z / p^L, with an index lookup."""
    mod = p**L
    reps = [(1, d) for d in range(mod)] + [(c, 1) for c in range(0, mod, p)]
    return reps


def _p1_index(r0, r1, p: int, L: int):
    """Index and scalar t with (r0, r1) = t * rep, for primitive vectors (arrays)."""
    mod = p**L
    r0 = r0 % mod
    r1 = r1 % mod
    unit0 = r0 % p != 0
    t = np.where(unit0, r0, r1)
    ti = inv_mod_array(t, mod)
    d = (r1 * ti) % mod
    c = (r0 * ti) % mod
    idx = np.where(unit0, d, mod + c // p)
    return idx, t


def projector_on_principal_series(kernel: MicrolocalKernel, chi: MultChar | None,
                                  level: int | None = None, samples: int = 20,
                                  seed: int = 0) -> ProjectorReport:
    """pi(f) on the K[L]-fixed part of chi (+) chi^-1 induced, exactly in Z[zeta_n].

    Vectors are functions F on primitive rows mod p^L with F(t v) = chi(t)^-2 F(v);
    (pi(g) F)(v) = chi(det g) F(v g).  chi=None means unramified (trivial on units).
    """
    p, N = kernel.p, kernel.N
    L = N if level is None else level
    if L < N:
        raise ModelError("model level below the conductor of f")
    n = unit_group_order(p, L)
    if chi is None:
        chi_exp = lambda u: np.zeros(np.shape(u), dtype=np.int64)
    else:
        if chi.N > L:
            raise ModelError("character conductor exceeds model level")
        c = chi.lift_level(L) if chi.N < L else chi
        chi_exp = c.exponent
    mod = p**L
    reps = np.array(_p1_basis(p, L), dtype=np.int64)
    dim = len(reps)
    # group elements [[1, b], [c, d]] of J / K[L]
    bs = np.arange(0, mod, p**kernel.N1)
    cs = np.arange(0, mod, p**kernel.N2)
    ds = np.array([d for d in range(mod) if d % p], dtype=np.int64)
    B_, C_, D_ = (x.ravel() for x in np.meshgrid(bs, cs, ds, indexing="ij"))
    det = (D_ - B_ * C_) % mod
    keep = det % p != 0
    B_, C_, D_, det = B_[keep], C_[keep], D_[keep], det[keep]
    G = len(B_)
    # f(g) up to vol(J)^-1: block sum at det / g11^2 = det (level N); exponents mod n
    table = kernel.evaluator.table.lift(max(kernel.evaluator.table.K, 0))
    tn = table.n
    Lg = dlog_table(p, N)[det % p**N]
    fco = table.c[Lg]  # (G, tn)
    # embed zeta_tn^e -> zeta_n^(e n / tn)
    S = np.zeros((dim, dim, n), dtype=np.int64)
    r0, r1 = reps[:, 0], reps[:, 1]
    nz_e = np.nonzero(np.any(fco != 0, axis=0))[0]
    for k in range(G):
        # row vector r * g = (r0 + r1 c, r0 b + r1 d)
        v0 = (r0 + r1 * C_[k]) % mod
        v1 = (r0 * B_[k] + r1 * D_[k]) % mod
        idx, t = _p1_index(v0, v1, p, L)
        e = (chi_exp(np.array([det[k]]))[0] - 2 * chi_exp(t)) % n
        # (pi(g) F)(r) = chi(det) chi(t)^-2 F(rep idx): matrix entry [r, idx]
        f = fco[k]
        for ee in nz_e:
            S[np.arange(dim), idx, (e + ee * (n // tn)) % n] += f[ee]
    scale = table.scale  # pi(f) = scale * S / G
    Sr = _reduce_cyclotomic_axis(S, n, axis=2)
    deg = _phi_deg(n)
    Sr = Sr[..., :deg]
    zero = not Sr.any()
    # conj: exponent negation then reduction
    Sc = _reduce_cyclotomic_axis(S[..., (-np.arange(n)) % n], n, axis=2)[..., :deg]
    self_adj = bool(np.array_equal(Sr, Sc.transpose(1, 0, 2)))
    # S^2 = (G / scale) S  <=>  P^2 = P
    S2 = _cyc_matmul(Sr, Sr, n, deg)
    lam = Fraction(G) / scale
    if lam.denominator != 1:
        idem = False
    else:
        idem = bool(np.array_equal(S2, Sr.astype(object) * int(lam))) if S2.dtype == object \
            else bool(np.array_equal(S2, Sr * int(lam)))
    tr = Sr[np.arange(dim), np.arange(dim)].sum(axis=0)
    if np.any(tr[1:]):
        raise ModelError("trace is not rational")
    trace = Fraction(int(tr[0])) * scale / G
    rank = int(trace) if trace.denominator == 1 else -1
    mode, checks = None, 0
    if not zero and chi is not None:
        mode, checks = _image_transform(Sr, kernel, chi_exp, n, deg, p, L, samples, seed)
    return ProjectorReport(rank, trace, idem, self_adj, zero, mode, checks, dim, G)


def _phi_deg(n: int) -> int:
    import sympy
    return int(sympy.totient(n))


def _cyc_matmul(A: np.ndarray, B: np.ndarray, n: int, deg: int) -> np.ndarray:
    """(A B) for matrices over Z[x]/Phi_n in the power basis."""
    dim = A.shape[0]
    bound = int(np.abs(A).max(initial=0)) * int(np.abs(B).max(initial=0)) * dim * deg
    out = np.zeros((dim, B.shape[1], 2 * deg - 1), dtype=np.int64 if bound < 2**62 else object)
    for e in range(deg):
        Ae = A[..., e]
        if not Ae.any():
            continue
        for f in range(deg):
            Bf = B[..., f]
            if not Bf.any():
                continue
            if bound < 2**52:
                out[..., e + f] += np.rint(Ae.astype(np.float64) @ Bf.astype(np.float64)).astype(np.int64)
            else:
                out[..., e + f] += Ae.astype(object) @ Bf.astype(object)
    full = np.zeros(out.shape[:2] + (n,), dtype=out.dtype)
    full[..., : 2 * deg - 1] = out
    return _reduce_cyclotomic_axis(full, n, axis=2)[..., :deg]


def _image_transform(Sr, kernel, chi_exp, n, deg, p, L, samples, seed):
    """Check g v = omega(a^2/nr(g)) v for the image vector v on sampled g in J."""
    mod = p**L
    col = int(np.argmax(np.any(Sr != 0, axis=(0, 2))))
    v = Sr[:, col, :]  # (dim, deg)
    reps = np.array(_p1_basis(p, L), dtype=np.int64)
    r0, r1 = reps[:, 0], reps[:, 1]
    rng = np.random.default_rng(seed)
    modes = {"omega(a^2/nr)": True, "omega(nr/a^2)": True}
    for _ in range(samples):
        while True:
            a_ = int(rng.integers(1, mod))
            d_ = int(rng.integers(1, mod))
            b_ = int(rng.integers(0, p ** (L - kernel.N1))) * p**kernel.N1
            c_ = int(rng.integers(0, p ** (L - kernel.N2))) * p**kernel.N2
            det = (a_ * d_ - b_ * c_) % mod
            if a_ % p and d_ % p and det % p:
                break
        v0 = (r0 * a_ + r1 * c_) % mod
        v1 = (r0 * b_ + r1 * d_) % mod
        idx, t = _p1_index(v0, v1, p, L)
        e = (chi_exp(np.array([det]))[0] - 2 * chi_exp(t)) % n
        gv = np.zeros((len(reps), n), dtype=np.int64)
        full_v = np.zeros((len(reps), n), dtype=np.int64)
        full_v[:, :deg] = v
        for j in range(n):
            if not full_v[:, j].any():
                continue
            np.add.at(gv, (np.arange(len(reps)), (e + j) % n), full_v[idx, j])
        gv = _reduce_cyclotomic_axis(gv, n, axis=1)[:, :deg]
        # omega = chi on units: scalar chi(a^2/det) or its inverse
        u = (a_ * a_ * pow(det, -1, mod)) % mod
        s = int(chi_exp(np.array([u]))[0])
        for name, ee in (("omega(a^2/nr)", s), ("omega(nr/a^2)", (-s) % n)):
            sv = np.zeros((len(reps), n), dtype=np.int64)
            sv[:, ee:] = full_v[:, : n - ee]
            sv[:, :ee] = full_v[:, n - ee:]
            sv = _reduce_cyclotomic_axis(sv, n, axis=1)[:, :deg]
            if not np.array_equal(gv, sv):
                modes[name] = False
    ok = [k for k, val in modes.items() if val]
    return (ok[0] if ok else None), samples
