"""Identity batteries behind the command line runner, and deterministic report output."""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .errors import ConfigError, PoleError
from .padic import LocalField

SUITES = ("fourier-kernel", "main-term", "stability", "specrep", "characters", "constants")

FOURIER_CONFIGS = ((3, 4, 1), (3, 5, 1), (5, 3, 1), (3, 5, 2))
ODD_Q_CONFIGS = ((3, 4, 1), (5, 3, 1))
CHARACTER_CONFIGS = ((3, 3, 1), (3, 4, 1), (5, 3, 1))
CONSTANT_PAIRS = ((11, 3), (11, 2), (5, 3), (7, 3), (2, 3), (3, 5), (13, 5), (3, 2), (5, 7), (17, 11))


# ------------------------------------------------------------ configuration

@dataclass
class RunConfig:
    p: int | None = None
    M: int | None = None
    N: list[int] | None = None
    N0: int | None = None
    m: int | None = None
    xi: int = 1
    backend: str = "exact"
    tolerance: float = 1e-9
    suites: list[str] = field(default_factory=lambda: ["all"])
    format: str = "json"
    out: str | None = None
    threads: int = 1
    timing: bool = False
    D: int = 11
    q: int | None = None

    def validate(self) -> None:
        if self.backend not in ("exact", "float"):
            raise ConfigError(f"backend must be exact or float, got {self.backend!r}")
        if self.format not in ("json", "md", "csv"):
            raise ConfigError(f"format must be json, md or csv, got {self.format!r}")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        for s in self.suites:
            if s != "all" and s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(SUITES + ('all',))}")
        if self.p is not None and self.p == 2:
            raise ConfigError("the kernel pipelines need odd p")
        for (p, N, N0, m) in self.pipeline_params():
            from .characters import check_N_N0
            check_N_N0(p, N, N0)
            if self.M is not None:
                LocalField(p, self.M).check_precision(N, N0, m)

    def pipeline_params(self):
        if self.p is None and self.N is None and self.N0 is None:
            return []
        if None in (self.p, self.N, self.N0):
            raise ConfigError("--p, --N and --N0 must be given together")
        m = self.N0 if self.m is None else self.m
        return [(self.p, N, self.N0, m) for N in self.N]

    def custom(self) -> bool:
        return self.p is not None

    def selected(self) -> list[str]:
        out = []
        for s in self.suites:
            for t in (SUITES if s == "all" else (s,)):
                if t not in out:
                    out.append(t)
        return out

    def meta(self) -> dict:
        """The part of the configuration that determines report contents."""
        return {"p": self.p, "precision": self.M, "N": self.N, "N0": self.N0, "m": self.m,
                "sigma": self.xi, "backend": self.backend, "tolerance": self.tolerance,
                "suites": self.selected(), "D": self.D, "q": self.q}


# ------------------------------------------------------------ rows and reports

def fmt(v) -> str:
    """Canonical text for report values."""
    from .constants import SymbolicReal
    from .cyclo import CycArray
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, SymbolicReal):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        if abs(v.imag) <= 1e-13 * max(1.0, abs(v.real)):
            return f"{v.real:.12g}"
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if isinstance(v, CycArray):
        r = v.rational_value()
        if r is not None and np.shape(r) == ():
            return str(r[()] if hasattr(r, "shape") else r)
        if v.shape == ():
            extra = "*sqrt(p)" if v.minimize().half else ""
            return "cyc[" + ";".join(f"{n}/{d}:{c}" for n, d, c in v.triples()) + f"]*{v.minimize().scale}{extra}"
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(fmt(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {fmt(x)}" for k, x in sorted(v.items(), key=lambda t: str(t[0]))) + "}"
    try:
        import sympy as sp
        if isinstance(v, sp.Basic):
            if v.is_Rational:
                return str(v)
            return fmt(complex(sp.N(v, 30)))
    except ImportError:  # pragma: no cover
        pass
    return str(v)


@dataclass
class Row:
    suite: str
    id: str
    inputs: dict
    lhs: str
    rhs: str
    passed: bool
    micros: int | None = None

    def key(self):
        return (self.suite, json.dumps(self.inputs, sort_keys=True), self.id)

    def as_dict(self) -> dict:
        return {"suite": self.suite, "id": self.id, "inputs": self.inputs, "lhs": self.lhs,
                "rhs": self.rhs, "pass": self.passed, "micros": self.micros}


@dataclass
class Report:
    config: dict
    rows: list[Row]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]


def _input_value(v):
    if isinstance(v, (int, bool, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)) and all(isinstance(x, int) for x in v):
        return list(v)
    return fmt(v)


def _inputs(d: dict) -> dict:
    return {k: _input_value(v) for k, v in d.items()}


class _Collector:
    def __init__(self, suite: str):
        self.suite = suite
        self.rows: list[Row] = []

    def add(self, id_: str, inputs: dict, lhs, rhs, passed: bool) -> None:
        self.rows.append(Row(self.suite, id_, _inputs(inputs), fmt(lhs), fmt(rhs), bool(passed)))


Task = Callable[[RunConfig], list[Row]]


# ------------------------------------------------------------ fourier-kernel

def _kernel(p, N, N0, xi):
    from .characters import SigmaClass
    from .kernels import build_f
    return build_f(N, SigmaClass(p, N0, xi), N0)


def _same(a, b, cfg: RunConfig) -> bool:
    if cfg.backend == "float":
        return a.to_float().equals(b.to_float(), cfg.tolerance)
    return a.equals(b)


def _fourier_task(p, N, N0, xi, closed_form: bool) -> Task:
    def run(cfg: RunConfig) -> list[Row]:
        from .kernels import (compute_phi, expected_normalization, heart_f_closed_form,
                              normalization_integral, phi_odd_q_closed_form, phi_support_report,
                              profile_I)
        c = _Collector("fourier-kernel")
        inp = {"p": p, "N": N, "N0": N0, "xi": xi}
        K = _kernel(p, N, N0, xi)
        hw = K.heart(1)
        cf = heart_f_closed_form(N, K.sigma, N0, hw.lo, hw.hi)
        c.add("kernel-construction", inp, "character-sum path", "closed form", _same(hw, cf, cfg))
        phi = compute_phi(K)
        if cfg.backend == "float":
            phi = phi.to_float()
        sup = phi_support_report(phi, K)
        for name in ("alpha", "beta", "gamma", "delta"):
            c.add(f"support-{name}", inp, sup[name], True, sup[name])
        c.add("unit-dilation", inp, sup["dilation"], True, sup["dilation"])
        I = profile_I(phi)
        c.add("weyl-symmetry", inp, "I(alpha, delta)", "I(-alpha, delta)", I.weyl_symmetric())
        c.add("delta-support", inp, I.delta_support_ok(N0), True, I.delta_support_ok(N0))
        nrm = normalization_integral(I)
        exp_ = expected_normalization(p, N, N0)
        ok = nrm == exp_ if cfg.backend == "exact" else abs(nrm - float(exp_)) <= cfg.tolerance * float(exp_)
        c.add("normalization", inp, nrm, exp_, ok)
        # N-stability against N + 1
        K2 = _kernel(p, N + 1, N0, xi)
        phi2 = compute_phi(K2)
        if cfg.backend == "float":
            phi2 = phi2.to_float()
        I2 = profile_I(phi2)
        st = I.rescaled(N).equals(I2.rescaled(N + 1))
        c.add("N-stability", dict(inp, N_next=N + 1), f"q^-{N} I(p^-{N} alpha, delta)",
              f"q^-{N + 1} I(p^-{N + 1} alpha, delta)", st)
        if closed_form:
            lit = phi_odd_q_closed_form(K, phi.lo, phi.hi)
            cor = phi_odd_q_closed_form(K, phi.lo, phi.hi, corrected=True)
            c.add("odd-q-closed-form", inp, "Phi (brute DFT)", "closed form, constant q^-N0 zeta(1)^-1",
                  _same(phi, lit, cfg))
            c.add("odd-q-closed-form-corrected", inp, "Phi (brute DFT)", "closed form, constant q^-N0",
                  _same(phi, cor, cfg))
        return c.rows
    return run


def fourier_tasks(cfg: RunConfig) -> list[Task]:
    if cfg.custom():
        confs = [(p, N, N0) for (p, N, N0, _) in cfg.pipeline_params()]
        return [_fourier_task(p, N, N0, cfg.xi, True) for (p, N, N0) in confs]
    return [_fourier_task(p, N, N0, cfg.xi, (p, N, N0) in ODD_Q_CONFIGS) for (p, N, N0) in FOURIER_CONFIGS]


# ------------------------------------------------------------ main-term

def _main_term_task(p, N, N0, m, xi) -> Task:
    def run(cfg: RunConfig) -> list[Row]:
        from .maintm import MainTerm, battery
        if N - N0 < 2 * m + 1:
            raise ConfigError(f"main-term identity needs N - N0 >= 2m + 1 (N={N}, N0={N0}, m={m})")
        c = _Collector("main-term")
        K = _kernel(p, N, N0, xi)
        mt = MainTerm(K, m)
        for psi in battery(m, p):
            inp = {"p": p, "N": N, "N0": N0, "m": m, "observable": psi.label}
            r = mt.row(psi)
            c.add("lhs-paths", inp, r.lhs_brute, r.lhs_closed, r.paths_agree)
            c.add("main-term", inp, r.lhs_closed, r.rhs, r.passed)
        return c.rows
    return run


def _main_term_orbit_checks(p, m) -> Task:
    def run(cfg: RunConfig) -> list[Row]:
        from .maintm import hensel_orbit_check, nh_classifier
        c = _Collector("main-term")
        for alpha0, depth in ((Fraction(1, 9), 1), (Fraction(2), 2)):
            h = hensel_orbit_check(alpha0, m, p, depth)
            inp = {"p": p, "m": m, "alpha0": str(alpha0), "depth": depth}
            c.add("orbit-parametrization", inp, f"bijective={h.bijective}, uniform={h.uniform}",
                  "bijective=True, uniform=True", h.bijective and h.uniform)
            c.add("orbit-inverse-coordinates", inp, f"y1y2={h.y1_y2_match}, y3={h.y3_corrected_match}",
                  "True", h.y1_y2_match and h.y3_corrected_match)
        for x1, x2 in ((0, 1), (3, 3), (Fraction(-1, 3), 3), (1, 0)):
            r = nh_classifier(x1, x2, m, p)
            c.add("orbit-classifier", {"p": p, "m": m, "x1": str(x1), "x2": str(x2)},
                  f"({r.cond_i}, {r.cond_ii}, {r.cond_iii})", "all equal", r.consistent)
        return c.rows
    return run


def main_term_tasks(cfg: RunConfig) -> list[Task]:
    if cfg.custom():
        return [_main_term_task(p, N, N0, m, cfg.xi) for (p, N, N0, m) in cfg.pipeline_params()[:1]] + \
            [_main_term_orbit_checks(cfg.p, max(1, cfg.pipeline_params()[0][3]))]
    return [_main_term_task(3, 5, 1, 1, cfg.xi), _main_term_orbit_checks(3, 1)]


# ------------------------------------------------------------ stability

ORBITAL_BATTERY = (
    ("diag(1,1+p)", (1, 0, 0, 4)),
    ("diag(1,1+p^2)", (1, 0, 0, 10)),
    ("diag(1,1+p^3)", (1, 0, 0, 28)),
    ("[[1,p^2],[p^3,1]]", (1, 9, 27, 1)),
    ("[[1/p,1],[0,1]]", (Fraction(1, 3), 1, 0, 1)),
)
META_TAUS = (1, 4, Fraction(1, 9), 9)


def _stability_closed(p, N, N0, m, xi) -> Task:
    def run(cfg: RunConfig) -> list[Row]:
        from .kernels import compute_phi
        from .schwartz import smooth_adjoint
        from .stability import phi_U_closed_form
        c = _Collector("stability")
        K = _kernel(p, N, N0, xi)
        U = smooth_adjoint(compute_phi(K, 1), m)
        C = phi_U_closed_form(K, m)
        c.add("phiU-closed-form", {"p": p, "N": N, "N0": N0, "m": m}, "brute smoothing", "closed form",
              _same(U, C, cfg))
        return c.rows
    return run


def _stability_meta(p, Ns, N0, m, xi) -> Task:
    def run(cfg: RunConfig) -> list[Row]:
        from .kernels import compute_phi
        from .padic import ord_p
        from .schwartz import smooth_adjoint
        from .stability import fit_equivalence, metaplectic_normal_form, stable_rescaling, zero_witness
        c = _Collector("stability")
        kernels = {N: _kernel(p, N, N0, xi) for N in Ns}
        resc = {N: stable_rescaling(smooth_adjoint(compute_phi(kernels[N], 1), m), N) for N in Ns}
        for N1, N2 in zip(Ns, Ns[1:]):
            c.add("N-stable-rescaling", {"p": p, "N0": N0, "m": m, "N": N1, "N_next": N2},
                  f"q^{N1} phiU_{N1}(delta, p^-{N1} eta)", f"q^{N2} phiU_{N2}(delta, p^-{N2} eta)",
                  resc[N1].equals(resc[N2]))
        for tau in META_TAUS:
            res = {N: metaplectic_normal_form(kernels[N], tau, m)[0] for N in Ns}
            v = ord_p(Fraction(tau), p)
            fits = [fit_equivalence(res[b], res[a], v, cfg.tolerance) for a, b in zip(Ns, Ns[1:])]
            single = all(f.holds for f in fits) and len({(f.gamma_angle, f.c) for f in fits}) == 1
            g8 = all(f.gamma_angle is not None and (f.gamma_angle * 8).denominator == 1 for f in fits)
            desc = "; ".join(f"gamma=exp(2 pi i {f.gamma_angle}), c={f.c}, exact={f.exact}" for f in fits)
            c.add("metaplectic-residual", {"p": p, "N0": N0, "m": m, "tau": str(tau), "N": list(Ns)},
                  desc, "one (gamma, c) with gamma^8 = 1", single and g8)
        for tau in (3, Fraction(1, 3)):
            ok = all(zero_witness(kernels[N], tau) for N in Ns)
            c.add("odd-tau-vanishing", {"p": p, "N0": N0, "tau": str(tau), "N": list(Ns)},
                  ok, True, ok)
        return c.rows
    return run


def _orbital_task(name, entries, p, N0, xi, Ns) -> Task:
    def run(cfg: RunConfig) -> list[Row]:
        from .characters import SigmaClass
        from .schwartz import GroupElem
        from .stability import orbital_threshold
        c = _Collector("stability")
        g = GroupElem(tuple(Fraction(x) for x in entries))
        r = orbital_threshold(g, 2, SigmaClass(p, N0, xi), N0, list(Ns))
        thr = r["threshold"]
        vals = [r["values"][N] for N in Ns]
        ok = thr is not None and thr <= 6 and thr < max(Ns)
        c.add("orbital-vanishing", {"p": p, "N0": N0, "U2_level": 2, "gamma": name, "N": list(Ns)},
              f"values={fmt(vals)}, threshold={thr}", "0 for N >= threshold, threshold <= 6", ok)
        return c.rows
    return run


def stability_tasks(cfg: RunConfig) -> list[Task]:
    if cfg.custom():
        pp = cfg.pipeline_params()
        p, N0, m = pp[0][0], pp[0][2], pp[0][3]
        Ns = sorted(N for (_, N, _, _) in pp)
        tasks = [_stability_closed(p, N, N0, m, cfg.xi) for N in Ns]
        if len(Ns) > 1:
            tasks.append(_stability_meta(p, Ns, N0, m, cfg.xi))
        return tasks
    tasks = [_stability_closed(3, 4, 1, 1, cfg.xi), _stability_meta(3, (4, 5, 6), 1, 1, cfg.xi)]
    tasks += [_orbital_task(n, e, 3, 1, cfg.xi, (2, 3, 4, 5, 6, 7)) for n, e in ORBITAL_BATTERY]
    return tasks


# ------------------------------------------------------------ specrep

def _satake_points(q: int):
    from .specrep import SatakeParams
    import sympy as sp
    pts = [("alpha=1", SatakeParams.real(1))]
    for t in (Fraction(1, 7), Fraction(2, 7), Fraction(1, 3), Fraction(1, 2), Fraction(2, 5), Fraction(3, 4)):
        pts.append((f"alpha=exp(i pi {t})", SatakeParams.tempered(t)))
    if q == 3:
        pts += [("alpha=11/10", SatakeParams.real(Fraction(11, 10))), ("alpha=-21/20", SatakeParams.real(Fraction(-21, 20))),
                ("alpha=exp(i pi 1/5)", SatakeParams.tempered(Fraction(1, 5)))]
    else:
        pts += [("alpha=sqrt(2)", SatakeParams.real(sp.sqrt(2))), ("alpha=6/5", SatakeParams.real(Fraction(6, 5))),
                ("alpha=exp(i pi 4/5)", SatakeParams.tempered(Fraction(4, 5)))]
    return pts


def _specrep_task(cfg: RunConfig) -> list[Row]:
    import sympy as sp
    from .specrep import (L_factors, SatakeParams, hecke_poly, macdonald_coefficient,
                          macdonald_induced_poly, macdonald_poly, macdonald_u_sum, rallis_integral_check,
                          whittaker_norm_check, whittaker_norm_closed, whittaker_poly, whittaker_value_closed)
    c = _Collector("specrep")
    for q in (3, 5):
        for n in range(9):
            ok = whittaker_poly(n, q) == hecke_poly(n, q)
            c.add("whittaker-hecke-polynomial", {"q": q, "n": n}, "W(p^n) in Q(sqrt q)[alpha, 1/alpha]",
                  "lambda(T_(p^n)) from left cosets", ok)
    for name, s in _satake_points(3):
        for n in range(9):
            h = hecke_poly(n, 3).to_complex(s)
            w = whittaker_value_closed(s, 3**n, 3, numeric=True)
            c.add("whittaker-hecke-pointwise", {"q": 3, "point": name, "n": n}, w, h,
                  abs(w - h) <= 1e-10 * max(1.0, abs(h)))
    one = SatakeParams.real(1)
    lam = hecke_poly(1, 3).evaluate(one)
    c.add("hecke-eigenvalue-example", {"q": 3, "point": "alpha=1", "n": 1}, sp.nsimplify(lam), "2/sqrt(3)",
          sp.simplify(lam - 2 / sp.sqrt(3)) == 0)
    # Whittaker norm
    nc = whittaker_norm_closed(one, 0, 3)
    c.add("whittaker-norm-closed-exact", {"q": 3, "point": "alpha=1", "s": 0}, nc, 3, nc == 3)
    for q in (3, 5):
        for name, s in _satake_points(q):
            r = whittaker_norm_check(s, 0, q, terms=200)
            c.add("whittaker-norm", {"q": q, "point": name, "s": 0, "terms": 200},
                  r.series, r.closed, r.rel_error < 1e-9)
    # Rallis
    for q in (3, 5):
        for name, s in _satake_points(q):
            r = rallis_integral_check(s, q, terms=60)
            c.add("local-rallis", {"q": q, "point": name, "terms": 60}, r.series, r.closed, r.rel_error < 1e-9)
    # Macdonald
    pts = _satake_points(3) + _satake_points(5)
    k = 0
    for name, s in pts:
        if s.degenerate:
            continue
        for q in (3, 5):
            if k >= 20:
                break
            v = macdonald_u_sum(s, q)
            c.add("macdonald-u-sum", {"q": q, "point": name}, v, 1, v == 1)
            k += 1
    for q in (3, 5):
        for m in range(5):
            c.add("macdonald-induced-model", {"q": q, "m": m}, "u1 t1^m + u2 t2^m", "induced-model average",
                  macdonald_poly(m, q) == macdonald_induced_poly(m, q))
    for m in range(4):
        lim = macdonald_coefficient(one, m, 3)
        gen = macdonald_poly(m, 3).evaluate(one)
        c.add("macdonald-degenerate-limit", {"q": 3, "m": m, "point": "alpha=1"}, sp.nsimplify(lim),
              sp.nsimplify(gen), sp.simplify(lim - gen) == 0)
    # L-factors
    ad = L_factors(one, "adjoint", 1, 3)
    c.add("L-adjoint", {"q": 3, "point": "alpha=1", "z": 1}, ad, "27/8", ad == sp.Rational(27, 8))
    st = L_factors(one, "standard", sp.Rational(1, 2), 3)
    c.add("L-standard", {"q": 3, "point": "alpha=1", "z": "1/2"}, complex(sp.N(st)), 5.59807621135,
          abs(complex(sp.N(st)) - 5.598076211353316) < 1e-10)
    try:
        L_factors(one, "adjoint", 0, 3)
        pole = False
    except PoleError:
        pole = True
    c.add("L-adjoint-pole", {"q": 3, "point": "alpha=1", "z": 0}, "PoleError" if pole else "value", "PoleError", pole)
    return c.rows


def specrep_tasks(cfg: RunConfig) -> list[Task]:
    return [_specrep_task]


# ------------------------------------------------------------ characters / projector

def _characters_task(p, N, N0) -> Task:
    def run(cfg: RunConfig) -> list[Row]:
        from .characters import (XN_count, enumerate_XN, inverse_exclusion, iota_is_isomorphism,
                                 sigma_classes, sigma_count)
        c = _Collector("characters")
        inp = {"p": p, "N": N, "N0": N0}
        nx = len(enumerate_XN(p, N))
        c.add("XN-count", inp, nx, XN_count(p, N), nx == (p - 1) ** 2 * p ** (N - 2))
        ns = len(sigma_classes(p, N0))
        c.add("Sigma-count", inp, ns, sigma_count(p, N0), ns == (p - 1) * p ** (N0 - 1))
        ie = inverse_exclusion(p, N, N0)
        c.add("inverse-exclusion", inp, f"{sum(ie.values())}/{len(ie)} blocks", "all blocks", all(ie.values()))
        iso = iota_is_isomorphism(p, N, N0)
        c.add("iota-isomorphism", inp, iso, True, iso)
        return c.rows
    return run


def _projector_task(p, N, N0, xi) -> Task:
    def run(cfg: RunConfig) -> list[Row]:
        from .characters import SigmaClass, block, partition_XN
        from .kernels import projector_on_principal_series
        c = _Collector("characters")
        K = _kernel(p, N, N0, xi)
        inp = {"p": p, "N": N, "N0": N0, "xi": xi}
        om = block(p, N, N0, xi)[0]
        r = projector_on_principal_series(K, om, samples=20)
        c.add("projector-in-block", dict(inp, chi="first character of the block"),
              f"rank={r.rank}, idempotent={r.idempotent}, self_adjoint={r.self_adjoint}",
              "rank=1, idempotent=True, self_adjoint=True", r.rank == 1 and r.idempotent and r.self_adjoint)
        c.add("projector-image-transform", dict(inp, samples=20), f"{r.image_transform} on {r.image_checks}",
              "omega(a^2/nr) on 20", r.image_transform == "omega(a^2/nr)" and r.image_checks == 20)
        u = projector_on_principal_series(K, None)
        c.add("projector-unramified", dict(inp, chi="unramified"), f"rank={u.rank}, zero={u.zero}",
              "rank=0", u.rank == 0 and u.zero)
        own = {SigmaClass(p, N0, xi), SigmaClass(p, N0, (-xi) % p**N0)}
        others = [s for s in partition_XN(p, N, N0) if s not in own]
        if others:
            s = sorted(others)[0]
            o = projector_on_principal_series(K, partition_XN(p, N, N0)[s][0])
            c.add("projector-other-block", dict(inp, other_xi=s.xi), f"rank={o.rank}, zero={o.zero}",
                  "rank=0", o.rank == 0 and o.zero)
        return c.rows
    return run


def characters_tasks(cfg: RunConfig) -> list[Task]:
    if cfg.custom():
        pp = cfg.pipeline_params()
        return [_characters_task(p, N, N0) for (p, N, N0, _) in pp] + \
            [_projector_task(p, N, N0, cfg.xi) for (p, N, N0, _) in pp[:1]]
    return [_characters_task(*c) for c in CHARACTER_CONFIGS] + \
        [_projector_task(3, 4, 1, cfg.xi), _projector_task(5, 3, 1, cfg.xi)]


# ------------------------------------------------------------ constants

def _constants_task(cfg: RunConfig) -> list[Row]:
    from .constants import (PI2, GlobalConfig, c0, c0_example, c0_general, c4_c0_identity, c_ledger,
                            family_size_example, family_size_general, volume_gamma_G,
                            volume_gamma_G_example)
    c = _Collector("constants")
    pairs = list(CONSTANT_PAIRS)
    if cfg.q is not None and (cfg.D, cfg.q) not in pairs:
        pairs.append((cfg.D, cfg.q))
    for D, q in pairs:
        g = GlobalConfig(D, q)
        inp = {"D": D, "q": q}
        c.add("family-size", inp, family_size_general(g), family_size_example(g),
              family_size_general(g) == family_size_example(g))
        c.add("c0-paths", inp, c0_general(g), c0_example(g), c0_general(g) == c0_example(g))
        c.add("vol-Gamma-G", inp, volume_gamma_G(g), volume_gamma_G_example(g),
              volume_gamma_G(g) == volume_gamma_G_example(g))
        led = c_ledger(g, 1)
        c.add("c-relation", inp, led.c2 / led.c1, led.c3, led.relation_holds)
        c.add("c4-over-c3", inp, led.c4_over_c3, 2, led.c4_over_c3 == 2)
        if q > 2:
            for N0, N in ((1, 2), (1, 5), (2, 4)):
                idc = c4_c0_identity(GlobalConfig(D, q, N, N0))
                c.add("c4-c0-identity", dict(inp, N=N, N0=N0), idc.lhs, idc.rhs, idc.holds)
    g = GlobalConfig(11, 3)
    v = c0(g)
    c.add("c0-example", {"D": 11, "q": 3}, v, "128/1089*pi^2", v == Fraction(128, 1089) * PI2)
    return c.rows


def constants_tasks(cfg: RunConfig) -> list[Task]:
    return [_constants_task]


TASKS = {
    "fourier-kernel": fourier_tasks,
    "main-term": main_term_tasks,
    "stability": stability_tasks,
    "specrep": specrep_tasks,
    "characters": characters_tasks,
    "constants": constants_tasks,
}


# ------------------------------------------------------------ running

def _timed(task: Task, cfg: RunConfig) -> list[Row]:
    t0 = time.perf_counter_ns()
    rows = task(cfg)
    if cfg.timing:
        us = (time.perf_counter_ns() - t0) // 1000
        for r in rows:
            r.micros = int(us)
    return rows


def run_suites(cfg: RunConfig) -> Report:
    """Run every selected suite; rows come back sorted, independent of thread count."""
    cfg.validate()
    from ._accel import set_threads
    set_threads(cfg.threads)
    tasks: list[Task] = []
    for name in cfg.selected():
        tasks += TASKS[name](cfg)
    if cfg.threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            chunks = list(ex.map(lambda t: _timed(t, cfg), tasks))
    else:
        chunks = [_timed(t, cfg) for t in tasks]
    rows = sorted((r for ch in chunks for r in ch), key=Row.key)
    return Report({"version": __version__, "config": cfg.meta()}, rows)


def run_suite(name: str, cfg: RunConfig | None = None, **overrides) -> Report:
    cfg = RunConfig() if cfg is None else cfg
    for k, v in overrides.items():
        if not hasattr(cfg, k):
            raise ConfigError(f"unknown configuration key {k!r}")
        setattr(cfg, k, v)
    cfg.suites = [name]
    if name != "all" and name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    return run_suites(cfg)


def emit_report(report: Report, fmt_: str = "json") -> bytes:
    rows = [r.as_dict() for r in report.rows]
    if fmt_ == "json":
        doc = {"meta": report.config, "rows": rows}
        return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()
    cols = ["suite", "id", "inputs", "lhs", "rhs", "pass", "micros"]
    cell = lambda r, k: json.dumps(r[k], sort_keys=True) if k == "inputs" else ("" if r[k] is None else str(r[k]))
    if fmt_ == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([cell(r, k) for k in cols])
        return buf.getvalue().encode()
    if fmt_ == "md":
        meta = json.dumps(report.config, sort_keys=True)
        lines = [f"<!-- {meta} -->", "| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        for r in rows:
            lines.append("| " + " | ".join(cell(r, k).replace("|", "\\|") for k in cols) + " |")
        return ("\n".join(lines) + "\n").encode()
    raise ConfigError(f"unknown format {fmt_!r}")
