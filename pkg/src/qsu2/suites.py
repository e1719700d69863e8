"""Verification suites: one function per module, each returning CheckReports.

Everything here is deterministic for a fixed RunConfig; reports carry no
timings.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import dirac_spectral as ds
from . import gns_rep as gr
from . import hochschild as hs
from . import zeta as zt
from .coordinate_algebra import (
    AlgebraElement,
    DiagonalAutomorphism,
    MonomialA,
    generators,
    haar_state,
    monomials_of_degree,
    monomials_up_to,
    star,
    transpose_automorphism,
)
from .enveloping_algebra import MonomialU, UElement, casimir, casimir_alt, star_u, ugen
from .left_action import LeftActionEngine, default_engine, sigma_L
from .reports import CheckReport
from .scalars import EXACT, DivergenceError, PoleError

SUITES = ("algebra", "action", "gns", "dirac", "zeta", "hochschild")

DEFAULT_TOLERANCES = {
    "gauge": 1e-9,
    "adjoint": 1e-9,
    "resolvent": 1e-12,
    "resolvent_convergence": 1e-8,
    "zeta_rel": 1e-8,
    "conjugate": 1e-12,
    "pole_rel": 1e-3,
    "psi_cross": 1e-10,
    "lipschitz_plateau": 1e-6,
}


@dataclass
class RunConfig:
    q: Fraction = Fraction(1, 2)
    trunc: int = 6
    num_trunc: int = 12
    gauge_rho: str = "auto"
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        self.q = Fraction(self.q)
        if not 0 < self.q < 1:
            raise ValueError(f"q must lie strictly inside (0, 1), got {self.q}")
        if self.trunc < 0 or self.num_trunc < 0:
            raise ValueError("truncations must be nonnegative")
        for k in self.tolerances:
            if k not in DEFAULT_TOLERANCES:
                raise ValueError(f"unknown tolerance {k!r}")

    def as_dict(self) -> dict:
        return {"q": str(self.q), "trunc": self.trunc, "num_trunc": self.num_trunc,
                "gauge_rho": self.gauge_rho, "seed": self.seed,
                "tolerances": dict(sorted(self.tolerances.items()))}


# ---------------------------------------------------------------------------
# random elements
# ---------------------------------------------------------------------------


def random_monomial_a(rng: random.Random, max_degree: int) -> MonomialA:
    return rng.choice(monomials_of_degree(rng.randint(0, max_degree)))


def random_element_a(rng: random.Random, max_degree: int, terms: int = 3, ring=EXACT) -> AlgebraElement:
    out = AlgebraElement({}, ring)
    for _ in range(terms):
        c = ring(Fraction(rng.randint(-5, 5), rng.randint(1, 4))) * ring.v_pow(rng.randint(-3, 3))
        out = out + AlgebraElement.monomial(random_monomial_a(rng, max_degree), c, ring)
    return out


def random_monomial_u(rng: random.Random, max_degree: int) -> MonomialU:
    while True:
        f, e = rng.randint(0, max_degree), rng.randint(0, max_degree)
        k = rng.randint(-max_degree, max_degree)
        if f + abs(k) + e <= max_degree:
            return MonomialU(f, k, e)


def random_element_u(rng: random.Random, max_degree: int, terms: int = 3, ring=EXACT) -> UElement:
    out = UElement({}, ring)
    for _ in range(terms):
        c = ring(Fraction(rng.randint(-5, 5), rng.randint(1, 4))) * ring.v_pow(rng.randint(-3, 3))
        out = out + UElement({random_monomial_u(rng, max_degree): c}, ring)
    return out


def _report(name, witness, checked, **params) -> CheckReport:
    return CheckReport(name, witness is None, params, checked=checked, witness=witness)


def _first(items):
    for w, lhs, rhs in items:
        if lhs != rhs:
            return w
    return None


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------


def suite_algebra(cfg: RunConfig) -> list[CheckReport]:
    rng = random.Random(cfg.seed)
    out = []
    triples = [tuple(AlgebraElement.monomial(random_monomial_a(rng, 4)) for _ in range(3)) for _ in range(500)]
    out.append(_report("algebra.A.associativity", _first((t, (t[0] * t[1]) * t[2], t[0] * (t[1] * t[2])) for t in triples),
                       len(triples), max_degree=4))
    utriples = [tuple(UElement({random_monomial_u(rng, 4): 1}) for _ in range(3)) for _ in range(500)]
    out.append(_report("algebra.U.associativity", _first((t, (t[0] * t[1]) * t[2], t[0] * (t[1] * t[2])) for t in utriples),
                       len(utriples), max_degree=4))

    pairs = [(random_element_a(rng, 3), random_element_a(rng, 3)) for _ in range(100)]
    out.append(_report("algebra.A.star_involutive", _first((x, star(star(x)), x) for x, _ in pairs), len(pairs)))
    out.append(_report("algebra.A.star_antimultiplicative",
                       _first(((x, y), star(x * y), star(y) * star(x)) for x, y in pairs), len(pairs)))
    upairs = [(random_element_u(rng, 3), random_element_u(rng, 3)) for _ in range(100)]
    out.append(_report("algebra.U.star_involutive", _first((x, star_u(star_u(x)), x) for x, _ in upairs), len(upairs)))
    out.append(_report("algebra.U.star_antimultiplicative",
                       _first(((x, y), star_u(x * y), star_u(y) * star_u(x)) for x, y in upairs), len(upairs)))

    # star maps each defining relation of A to a relation: lhs* - rhs* == 0
    g = generators()
    a, b, c, d = g["a"], g["b"], g["c"], g["d"]
    q = EXACT.q_pow(1)
    rels = [(a * b, (b * a).scale(q)), (a * c, (c * a).scale(q)), (b * d, (d * b).scale(q)),
            (c * d, (d * c).scale(q)), (b * c, c * b), (a * d - (b * c).scale(q), AlgebraElement.scalar(1)),
            (d * a - (b * c).scale(EXACT.q_pow(-1)), AlgebraElement.scalar(1))]
    out.append(_report("algebra.A.relations", _first((i, l, r) for i, (l, r) in enumerate(rels)), len(rels)))
    out.append(_report("algebra.A.star_respects_relations",
                       _first((i, star(l), star(r)) for i, (l, r) in enumerate(rels)), len(rels)))

    homog = None
    for x, y, _ in triples[:200]:
        (gx,), (gy,) = x.gradings(), y.gradings()
        if not (x * y).gradings() <= {(gx[0] + gy[0], gx[1] + gy[1])}:
            homog = (x, y)
            break
    out.append(_report("algebra.A.grading_homogeneous", homog, 200))

    cq, alt = casimir(), casimir_alt()
    out.append(_report("algebra.casimir_presentations", None if cq == alt else "differ", 1))
    gens_u = [ugen(n) for n in ("e", "f", "k", "kinv")]
    out.append(_report("algebra.casimir_central", _first((i, cq * x, x * cq) for i, x in enumerate(gens_u)), 4))
    out.append(_report("algebra.casimir_selfadjoint", None if star_u(cq) == cq else "star", 1))

    monos6 = [AlgebraElement.monomial(m) for m in monomials_up_to(6)]
    sl = sigma_L()
    out.append(_report("algebra.haar_sigma_L_invariant",
                       _first((x, haar_state(sl(x)), haar_state(x)) for x in monos6), len(monos6), degree=6))
    monos4 = [AlgebraElement.monomial(m) for m in monomials_up_to(4)]
    out.append(_report("algebra.sigma_L_unitarity",
                       _first((x, sl(star(x)), star(sl.inverse()(x))) for x in monos4), len(monos4), degree=4))
    return out


# ---------------------------------------------------------------------------
# action
# ---------------------------------------------------------------------------


def suite_action(cfg: RunConfig) -> list[CheckReport]:
    out = []
    ring = EXACT
    monos = [AlgebraElement.monomial(m) for m in monomials_up_to(4)]
    kappa = ring.one / (ring.q_pow(1) - ring.q_pow(-1))
    for rho in (ring.one, ring.q_pow(1), ring(Fraction(3, 2))):
        eng = LeftActionEngine(rho)
        e, f, k, ki = eng.e, eng.f, eng.k, eng.kinv

        def kk(x, p):
            return eng.k_power(x, p)

        rel = _first(
            (x, lhs, rhs)
            for x in monos
            for lhs, rhs in (
                (e(f(x)) - f(e(x)), (kk(x, 2) - kk(x, -2)).scale(kappa)),
                (k(e(x)), e(k(x)).scale(ring.q_pow(1))),
                (k(f(x)), f(k(x)).scale(ring.q_pow(-1))),
                (k(ki(x)), x),
            )
        )
        out.append(_report("action.U_relations", rel, len(monos), gauge_rho=str(rho), degree=4))
        small = [AlgebraElement.monomial(m) for m in monomials_up_to(3)]
        wd = _first(
            ((x, y), lhs, rhs)
            for x in small for y in small
            for lhs, rhs in (
                (e(x * y), e(x) * ki(y) + k(x) * e(y)),
                (f(x * y), f(x) * ki(y) + k(x) * f(y)),
                (k(x * y), k(x) * k(y)),
            )
        )
        out.append(_report("action.respects_A_relations", wd, len(small) ** 2, gauge_rho=str(rho), degree=3))

    eng = default_engine()
    for name, d in (("del1", eng.del1), ("del3", eng.del3)):
        rep = eng.verify_twisted_leibniz(d, 3, True, name)
        out.append(CheckReport(f"action.twisted_leibniz[{name}]", rep.passed, {"degree": 3}, checked=rep.checked,
                               witness=rep.witness))
    rep = eng.verify_twisted_leibniz(eng.del2, 2, False, "del2")
    out.append(CheckReport("action.del2_not_untwisted_derivation", not rep.passed, {"degree": 2},
                           checked=rep.checked, details={"counterexample": [str(w) for w in rep.witness or ()]}))
    minus1 = AlgebraElement.scalar(-1)
    out.append(_report("action.del2_inner",
                       _first((x, eng.del2(x), minus1 * x - eng.sigma(x) * minus1) for x in monos), len(monos)))

    sl = eng.sigma
    alphas = [DiagonalAutomorphism(ring.v_pow(i), ring.v_pow(j) * ring(Fraction(2, 3))) for i, j in ((1, -2), (-3, 1), (2, 2))]
    out.append(_report("action.diagonal_commutes_with_sigma_L",
                       _first(((i, x), al(sl(x)), sl(al(x))) for i, al in enumerate(alphas) for x in monos),
                       len(monos) * len(alphas)))
    # sigma = alpha o sigma_L^-3: sigma(del1 x) = mu q^6 del1(sigma x), sigma(del3 y) = mu^-1 q^-6 del3(sigma y)
    m3 = [AlgebraElement.monomial(m) for m in monomials_up_to(3)]
    bad = None
    for al in alphas:
        sig = al.compose(sl.power(-3))
        mu = al.mu_h ** 2
        for x in m3:
            if sig(eng.del1(x)) != eng.del1(sig(x)).scale(mu * ring.q_pow(6)):
                bad = (repr(al), x, "del1")
                break
            if sig(eng.del3(x)) != eng.del3(sig(x)).scale(ring.one / (mu * ring.q_pow(6))):
                bad = (repr(al), x, "del3")
                break
        if bad:
            break
    out.append(_report("action.sigma_del_scaling", bad, len(m3) * len(alphas), degree=3))
    return out


# ---------------------------------------------------------------------------
# gns
# ---------------------------------------------------------------------------


def _gauge_from_config(cfg: RunConfig):
    if cfg.gauge_rho == "auto":
        return None
    text = cfg.gauge_rho.strip()
    if text.startswith("q^"):
        exp = Fraction(text[2:])
        if (2 * exp).denominator != 1:
            raise ValueError("gauge exponent must be a half-integer")
        return EXACT.v_pow(int(2 * exp))
    return EXACT(Fraction(text))


def suite_gns(cfg: RunConfig) -> list[CheckReport]:
    out = []
    N = cfg.trunc
    dims = {n: gr.build_truncation(n).dim for n in range(N + 1)}
    bad = next((n for n, d in dims.items() if d != sum((k + 1) ** 2 for k in range(n + 1))), None)
    out.append(CheckReport("gns.dimension_formula", bad is None, {"N_max": N}, checked=len(dims), witness=bad,
                           details={"dims": dims}))
    space = gr.build_truncation(N)
    out.append(gr.verify_labels(space))
    out.append(gr.verify_ef_fe(space))

    tol = cfg.tolerances["gauge"]
    if N >= 2:
        rho = gr.calibrate_gauge(space, cfg.q, l_max=Fraction(min(N, 6), 2))
        others = {str(q0): str(gr.calibrate_gauge(space, q0, l_max=Fraction(min(N, 6), 2))) for q0 in ("1/4", "1/2")}
        out.append(CheckReport("gns.gauge_calibration", len(set(others.values()) | {str(rho)}) == 1,
                               {"q": str(cfg.q), "l_max": str(Fraction(min(N, 6), 2))},
                               details={"rho_star": str(rho), "rho_star_by_q": others}))
        mism = gr.gauge_mismatch(space, cfg.q, LeftActionEngine(rho * 10))
        out.append(CheckReport("gns.gauge_linearity", abs(mism - 10) < 10 * tol, {"gauge": "10 rho*"},
                               max_error=abs(mism - 10)))
        explicit = _gauge_from_config(cfg)
        if explicit is not None:
            m = gr.gauge_mismatch(space, cfg.q, LeftActionEngine(explicit))
            out.append(CheckReport("gns.configured_gauge", abs(m - 1) < tol, {"gauge_rho": cfg.gauge_rho},
                                   max_error=abs(m - 1)))
        err = gr.adjointness_error(space, cfg.q, LeftActionEngine(rho))
        out.append(CheckReport("gns.adjointness", err < cfg.tolerances["adjoint"], {"q": str(cfg.q), "N": N},
                               max_error=err))

    modular = [gr.verify_modular_identity(AlgebraElement.monomial(m), space) for m in monomials_up_to(2)]
    bad = next((r.parameters["x"] for r in modular if not r.passed), None)
    out.append(CheckReport("gns.modular_identity", bad is None, {"N": N, "degree": 2},
                           checked=sum(r.checked for r in modular), witness=bad))

    for q0 in ("1/4", "1/2", "3/4"):
        minors = gr.gram_leading_minors(N, q0)
        bad = next((i for i, m in enumerate(minors) if m <= 0), None)
        out.append(CheckReport("gns.gram_positivity", bad is None, {"q": q0, "N": N}, checked=len(minors), witness=bad))

    lam, mu = hs.derive_modular_parameters(cfg.q)
    trace = hs.TwistedTrace(haar_state, DiagonalAutomorphism(lam, mu), name="h", verify=False)
    rep = trace.twisted_trace_report(4)
    rep.details = {"lam_h": str(lam), "mu_h": str(mu)}
    out.append(rep)
    inv = trace.invariance_report(degree=6)
    out.append(inv)

    gc = gr.growth_constants(cfg.num_trunc, cfg.q)
    out.append(CheckReport("gns.growth_constants", math.isfinite(gc["C1"]) and math.isfinite(gc["C2"]),
                           {"q": str(cfg.q), "N": cfg.num_trunc},
                           details={"C1": float(gc["C1"]), "C2": float(gc["C2"])}))
    return out


# ---------------------------------------------------------------------------
# dirac
# ---------------------------------------------------------------------------


def lipschitz_sequence(x: AlgebraElement, q0, Ns) -> list[dict]:
    return [ds.lipschitz_sup(x, q0, N) for N in Ns]


def suite_dirac(cfg: RunConfig) -> list[CheckReport]:
    out = []
    N = cfg.trunc
    space = ds.DoubledSpace(gr.build_truncation(N))
    out.append(ds.dirac_squared_identity(space))
    out.append(ds.dirac_delta_commutator(space))
    out.append(ds.diagonal_anticommutation(space))

    xs = [AlgebraElement.monomial(m) for m in monomials_up_to(2) if m.degree >= 1]
    reps = [ds.verify_twisted_commutator(x, space, interior=True) for x in xs]
    bad = next((r.parameters["x"] for r in reps if not r.passed), None)
    out.append(CheckReport("dirac.twisted_commutator", bad is None, {"N": N, "rows": "interior", "degree": "1..2"},
                           checked=sum(r.checked for r in reps), witness=bad))

    absd = ds.abs_dirac(space)
    D = ds.build_dirac(space)
    sq = (absd @ absd).assemble(space)
    d2 = (D @ D).assemble(space)
    out.append(CheckReport("dirac.abs_squared", sq == d2, {"N": N}, checked=space.dim))
    vals = [EXACT.to_numeric(v, cfg.q) for v in sq.diagonal_entries()]
    out.append(CheckReport("dirac.abs_positive", min(vals) > 0, {"q": str(cfg.q), "N": N}, checked=len(vals)))

    # Psi(P_{n,l}) = mult q^n exactly, mult <= 2(2l+1)
    mult = ds.multiplicities(space)
    bad = None
    for (l2, n2), count in sorted(mult.items()):
        if l2 > 6:
            continue
        P = ds.projection(space, Fraction(n2, 2), Fraction(l2, 2))
        if ds.psi_trace(P, space) != EXACT.v_pow(n2) * count or count > 2 * (l2 + 1):
            bad = (l2, n2)
            break
        if count != ds.multiplicity(Fraction(l2, 2), Fraction(n2, 2)):
            bad = (l2, n2, "multiplicity")
            break
    out.append(CheckReport("dirac.psi_block_bound", bad is None, {"l_max": "3"}, checked=len(mult), witness=bad))

    worst, prev, mono = 0.0, 0.0, True
    for L2 in range(0, 61):
        r = ds.resolvent_trace_partial(Fraction(L2, 2), cfg.q)
        worst = max(worst, r.value - r.majorant)
        mono = mono and r.value >= prev
        prev = r.value
    out.append(CheckReport("dirac.resolvent_majorant", worst <= cfg.tolerances["resolvent"] and mono,
                           {"q": str(cfg.q), "L_max": "30"}, max_error=max(worst, 0.0), checked=61))
    # L = 60 vs 80 at q = 1/2; pushed out until the majorant's block term is negligible
    tol = cfg.tolerances["resolvent_convergence"]
    L, qf = 60, float(cfg.q)
    while 2 * (2 * L + 1) * (2 * L + 2) / ((qf ** -(L + 0.5) - qf ** (L + 0.5)) / (1 / qf - qf)) > tol / 100:
        L += 20
    r1 = ds.resolvent_trace_partial(L, cfg.q).value
    r2 = ds.resolvent_trace_partial(L + 20, cfg.q).value
    out.append(CheckReport("dirac.resolvent_convergence", abs(r2 - r1) < tol,
                           {"q": str(cfg.q), "L": f"{L} vs {L + 20}"}, max_error=abs(r2 - r1)))

    # Lipschitz sups: increasing and geometrically converging in N
    g = generators()
    Ns = list(range(4, cfg.num_trunc + 1, 2))
    for name in ("a", "c"):
        seq = lipschitz_sequence(g[name], cfg.q, Ns)
        sups = [s["sup"] for s in seq]
        incs = [b - a for a, b in zip(sups, sups[1:])]
        ok = all(i >= -1e-15 for i in incs) and all(b <= a for a, b in zip(incs, incs[1:]))
        ratio = max((b / a for a, b in zip(incs, incs[1:]) if a > 0), default=0.0)
        tail = incs[-1] * ratio / (1 - ratio) if incs and ratio < 1 else math.inf
        out.append(CheckReport(f"dirac.lipschitz_bounded[{name}]", ok and ratio < 1, {"q": str(cfg.q), "N": Ns},
                               details={"sups": sups, "increment_ratio": ratio, "tail_estimate": tail,
                                        "raising_C1": [s["raising_C1"] for s in seq]}))
    return out


# ---------------------------------------------------------------------------
# zeta
# ---------------------------------------------------------------------------


ZETA_GRID = {"re": (0.75, 1.0, 2.0, 3.0), "im": (0.0, 4.0, -4.0), "q": ("3/10", "1/2", "4/5")}
ZETA_MINUS_ONE_HALF = -16.43689567102627  # zeta_q(-1) at q = 1/2, frozen from the closed form


def zeta_grid_rows(res=ZETA_GRID["re"], ims=ZETA_GRID["im"], qs=ZETA_GRID["q"]) -> list[dict]:
    rows = []
    for q0 in qs:
        for re in res:
            for im in ims:
                z = complex(re, im)
                row = {"q": str(q0), "re_z": re, "im_z": im}
                try:
                    d = zt.zeta_direct(z, q0)
                    c = zt.zeta_closed_form(z, q0)
                    row.update(direct=d.value, closed=c.value, tail_bound=d.tail_bound,
                               rel_diff=abs(d.value - c.value) / abs(c.value), error="")
                except (PoleError, DivergenceError) as exc:
                    row.update(direct=None, closed=None, tail_bound=None, rel_diff=None, error=str(exc))
                rows.append(row)
    return rows


def suite_zeta(cfg: RunConfig) -> list[CheckReport]:
    out = []
    rows = zeta_grid_rows()
    worst = max(r["rel_diff"] for r in rows if r["rel_diff"] is not None)
    errors = [r for r in rows if r["error"]]
    out.append(CheckReport("zeta.oracle_agreement", worst < cfg.tolerances["zeta_rel"] and not errors,
                           {"grid": {k: list(map(str, v)) for k, v in ZETA_GRID.items()}},
                           max_error=worst, checked=len(rows)))
    z0 = zt.zeta_closed_form(0, cfg.q).value
    out.append(CheckReport("zeta.value_at_zero", z0 == 0, {"q": str(cfg.q)}, details={"value": str(z0)}))
    conj = 0.0
    for z in (complex(2, 3), complex(-1.3, 0.7), complex(0.2, -5)):
        a = zt.zeta_closed_form(z, cfg.q).value
        b = zt.zeta_closed_form(z.conjugate(), cfg.q).value
        conj = max(conj, abs(a - b.conjugate()) / max(abs(a), 1e-300))
    out.append(CheckReport("zeta.conjugate_symmetry", conj < cfg.tolerances["conjugate"], {"q": str(cfg.q)},
                           max_error=conj, checked=3))
    zm1 = zt.zeta_closed_form(-1, "1/2").value
    err = abs(zm1 - ZETA_MINUS_ONE_HALF) / abs(ZETA_MINUS_ONE_HALF)
    out.append(CheckReport("zeta.golden_minus_one", err < 1e-12, {"q": "1/2", "z": "-1"}, max_error=err))

    # tail bounds: doubling l_max moves the value by less than the bound
    bad = None
    for z in (2, complex(1, 4), 0.75):
        for lm in (10, 20):
            a = zt.zeta_direct(z, cfg.q, l_max=lm)
            b = zt.zeta_direct(z, cfg.q, l_max=2 * lm)
            if abs(b.value - a.value) > a.tail_bound:
                bad = (str(z), lm)
    out.append(CheckReport("zeta.tail_bound_valid", bad is None, {"q": str(cfg.q)}, checked=6, witness=bad))

    diags = [zt.pole_diagnostic(k, t, cfg.q, cfg.tolerances["pole_rel"]) for k in (0, 1) for t in (-1, 0, 1)]
    bad = next(((d.k, d.t) for d in diags if not d.double_pole), None)
    out.append(CheckReport("zeta.double_poles", bad is None, {"q": str(cfg.q), "k": [0, 1], "t": [-1, 0, 1]},
                           checked=len(diags), witness=bad,
                           details={f"{d.k},{d.t}": {"c_minus2": str(d.estimate), "spread": d.relative_spread}
                                    for d in diags}))
    reg = zt.regular_point_diagnostic(0, cfg.q)
    out.append(CheckReport("zeta.regular_point", reg["is_zero"], {"z": "0"}, max_error=reg["abs_estimate"]))
    for s in (1, 2):
        sw = zt.spectral_dimension_sweep(s, cfg.q, [Fraction(s, 2) - Fraction(1, 10), Fraction(s, 2),
                                                    Fraction(s, 2) + Fraction(1, 10)])
        classes = [r["convergent"] for r in sw.rows]
        out.append(CheckReport("zeta.spectral_dimension", classes == [False, False, True] and sw.threshold == Fraction(s, 2),
                               {"s": s, "q": str(cfg.q)}, details={"threshold": str(sw.threshold)}))
    a, b = zt.psi_cross_check(cfg.num_trunc, cfg.q, 2)
    err = abs(a - b) / abs(b)
    out.append(CheckReport("zeta.psi_cross_check", err < cfg.tolerances["psi_cross"], {"N": cfg.num_trunc, "z": 2},
                           max_error=err))
    return out


# ---------------------------------------------------------------------------
# hochschild
# ---------------------------------------------------------------------------


def _expect_error(name, fn, exc_type, identity_fragment) -> CheckReport:
    try:
        fn()
    except exc_type as exc:
        ok = identity_fragment in str(exc)
        return CheckReport(name, ok, details={"error": str(exc)})
    return CheckReport(name, False, details={"error": None})


def suite_hochschild(cfg: RunConfig, k2: bool = True) -> list[CheckReport]:
    out = []
    lam, mu = hs.derive_modular_parameters(cfg.q)
    # by hand: h(ad)/h(da) = q^-2 and h(bc) = h(cb) give lam_h = mu_h = q^-1
    out.append(CheckReport("hochschild.modular_parameters", lam == mu == EXACT.q_pow(-1),
                           {"q": str(cfg.q)}, details={"lam_h": str(lam), "mu_h": str(mu)}))
    ident = hs.TwistedTrace(haar_state, DiagonalAutomorphism(1, 1), name="h_untwisted", verify=False)
    rep = ident.twisted_trace_report(1)
    out.append(CheckReport("hochschild.haar_not_a_trace", not rep.passed, details={"witness": str(rep.witness)}))
    alpha = DiagonalAutomorphism(lam, mu)
    sl = sigma_L()
    monos = [AlgebraElement.monomial(m) for m in monomials_up_to(4)]
    out.append(_report("hochschild.alpha_commutes_sigma_L", _first((x, alpha(sl(x)), sl(alpha(x))) for x in monos),
                       len(monos)))

    h = hs.haar_trace()
    out.append(CheckReport("hochschild.coboundary_of_trace",
                           hs.check_zero("b(tau)", hs.coboundary(_as_cochain(h)), hs.exhaustive_tuples(2, 3)).passed,
                           checked=len(hs.exhaustive_tuples(2, 3))))

    dirac_sigma = hs.build_dirac_cochain(h, 1).sigma
    # exhaustive degree <= 2 plus 100 balanced tuples with degree-3 entries
    for arity, sample_deg in ((1, (3, 3, 2)), (2, 3)):
        r = hs.random_cochain(arity, dirac_sigma, seed=cfg.seed)
        tuples = hs.exhaustive_tuples(arity + 2, 2) + hs.balanced_tuples(arity + 2, sample_deg, 100, cfg.seed)
        rep = hs.check_zero(f"b_sigma(b_sigma(psi)) = 0 [{arity - 1}-cochain]",
                            hs.coboundary(hs.coboundary(r)), tuples)
        out.append(rep)

    dd = hs.standard_derivations()
    for s in hs._PERMS:
        phi = hs.build_local_cochain(h, [dd[i] for i in s])
        tuples = hs.exhaustive_tuples(5, 2) + hs.balanced_tuples(5, (3, 3, 3, 3, 2), 100, cfg.seed)
        out.append(hs.check_zero(f"b_sigma(phi_s) = 0 [s={''.join(map(str, s))}]", hs.coboundary(phi), tuples))
        eq_tuples = hs.exhaustive_tuples(4, 1) + hs.balanced_tuples(4, 3, 50, cfg.seed, target=(0, 0))
        out.append(phi.equivariance_report(eq_tuples))
    phi1 = hs.build_local_cochain(h, [dd[1]])
    out.append(hs.check_zero("b_sigma(phi) = 0 [n=1, del1]", hs.coboundary(phi1),
                             hs.exhaustive_tuples(3, 2) + hs.balanced_tuples(3, 2, 100, cfg.seed, target=(0, -2))))

    out.append(_expect_error("hochschild.counit_rejected", lambda: hs.triviality_certificate(hs.counit_trace()),
                             hs.PreconditionError, "sigma_L"))
    bad_trace = hs.TwistedTrace(haar_state, transpose_automorphism(), name="h_transpose", verify=False)
    out.append(_expect_error("hochschild.noncommuting_alpha_rejected",
                             lambda: hs.build_local_cochain(bad_trace, [dd[1]]),
                             hs.PreconditionError, "theta o alpha"))

    taus = [h] + [hs.haar_trace(twist=a) for a in hs.random_haar_twists(3, cfg.seed)]
    for tau in taus:
        cert = hs.triviality_certificate(tau, seed=cfg.seed)
        out.append(CheckReport("hochschild.triviality_certificate", cert["passed"], {"tau": cert["tau_params"]},
                               checked=sum(c["tuples_checked"] for c in cert["checks"]), details=cert))

    if k2:
        phi2 = hs.build_dirac_cochain(h, 2)
        dec2, _ = hs.dirac_decomposition(h, 2)
        psi2, _ = hs.dirac_transgression(h, 2)
        t6 = hs.exhaustive_tuples(6, 1)
        out.append(hs.check_identity("k=2: phi = sum_w c_w phi_w", phi2, dec2, t6))
        out.append(hs.check_identity("k=2: b_sigma(psi) = phi", hs.coboundary(psi2), phi2, t6))
    return out


def _as_cochain(tau: hs.TwistedTrace) -> hs.TwistedCochain:
    """tau as a 0-cochain with twist alpha."""
    return hs.TwistedCochain(1, lambda t: tau.on_monomial(t[0]), tau.alpha, tau.ring, name=tau.name)


SUITE_FUNCS = {
    "algebra": suite_algebra,
    "action": suite_action,
    "gns": suite_gns,
    "dirac": suite_dirac,
    "zeta": suite_zeta,
    "hochschild": suite_hochschild,
}


def run_suites(names, cfg: RunConfig) -> dict:
    names = list(SUITES) if "all" in names else list(names)
    out = {}
    for n in names:
        out[n] = [r.as_dict() for r in SUITE_FUNCS[n](cfg)]
    return out
