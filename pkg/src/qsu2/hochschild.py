"""Twisted Hochschild cochains on O(SU_q(2)).

Conventions.  An n-cochain is a multilinear functional of arity n + 1 with
phi o sigma = phi, and

    b_s(phi)(b0, ..., b_{n+1}) = (-1)^(n+1) phi(s(b_{n+1}) b0, b1, ..., b_n)
                                 + sum_i (-1)^i phi(..., b_i b_{i+1}, ...).

A twisted trace for alpha satisfies tau(xy) = tau(alpha(y) x); this is the
form under which b_alpha(tau) = 0.  Cochains are evaluation procedures:
values are computed on tuples of PBW monomials and extended multilinearly,
and identities are checked pointwise on tuple sets.
"""

from __future__ import annotations

import itertools
import math
import multiprocessing
import os
import random
from dataclasses import dataclass, field

import numpy as np

from .coordinate_algebra import (
    AlgebraElement,
    DiagonalAutomorphism,
    MonomialA,
    counit,
    generators,
    haar_state,
    monomial_product,
    monomials_of_degree,
    monomials_up_to,
)
from .dirac_spectral import BlockOperator2x2, twisted_commutator_symbolic
from .left_action import LeftActionEngine, default_engine, sigma_L
from .reports import CheckReport
from .scalars import EXACT, eval_numeric, parse_rational

__all__ = [
    "PreconditionError",
    "ModularParameterError",
    "TwistedTrace",
    "TwistedCochain",
    "DerivationSpec",
    "standard_derivations",
    "coboundary",
    "combine",
    "build_local_cochain",
    "transgress",
    "build_dirac_cochain",
    "dirac_words",
    "dirac_decomposition",
    "dirac_transgression",
    "triviality_certificate",
    "derive_modular_parameters",
    "haar_trace",
    "random_haar_twists",
    "counit_trace",
    "exhaustive_tuples",
    "balanced_tuples",
    "check_identity",
    "check_zero",
    "random_cochain",
    "workers_from_env",
]


class PreconditionError(ValueError):
    """A hypothesis of a construction failed; carries the identity and a witness."""

    def __init__(self, identity: str, witness=None):
        self.identity = identity
        self.witness = witness
        shown = None if witness is None else tuple(str(w) for w in _as_tuple(witness))
        super().__init__(f"precondition failed: {identity}; witness {shown}")


class ModularParameterError(ArithmeticError):
    pass


def _as_tuple(w):
    return w if isinstance(w, tuple) else (w,)


def _mono(m, ring) -> AlgebraElement:
    return AlgebraElement.monomial(m, 1, ring)


def _total_grading(monos) -> tuple:
    m2 = n2 = 0
    for m in monos:
        g = m.grading
        m2 += g[0]
        n2 += g[1]
    return (m2, n2)


def _auto_params(alpha) -> dict:
    if isinstance(alpha, DiagonalAutomorphism):
        return {"type": "diagonal", "lam_h": str(alpha.lam_h), "mu_h": str(alpha.mu_h)}
    return {"type": type(alpha).__name__}


class _Composite:
    """outer o inner for automorphisms that are not both diagonal."""

    def __init__(self, outer, inner):
        self.outer, self.inner = outer, inner

    def __call__(self, x):
        return self.outer(self.inner(x))


def _compose(outer, inner):
    if isinstance(outer, DiagonalAutomorphism) and isinstance(inner, DiagonalAutomorphism):
        return outer.compose(inner)
    return _Composite(outer, inner)


def _first_mismatch(pairs):
    for witness, lhs, rhs in pairs:
        if lhs != rhs:
            return witness
    return None


# ---------------------------------------------------------------------------
# twisted traces
# ---------------------------------------------------------------------------


class TwistedTrace:
    """A linear functional tau with tau(xy) = tau(alpha(y) x).

    `support`, when given, is a predicate on (2m, 2n) gradings outside of
    which tau vanishes; cochains use it to skip tuples.  With verify=True
    the twisted-trace property and sigma_L-invariance are checked on
    monomials up to check_degree and a PreconditionError is raised on the
    first failure.
    """

    def __init__(self, functional, alpha, *, ring=EXACT, name="tau", params=None,
                 support=None, check_degree=3, verify=True):
        self.functional = functional
        self.alpha = alpha
        self.ring = ring
        self.name = name
        self.params = dict(params or {})
        self.support = support
        self._cache: dict = {}
        self._pair_cache: dict = {}
        if verify:
            self.require(check_degree)

    def on_monomial(self, m: MonomialA):
        hit = self._cache.get(m)
        if hit is None:
            hit = self._cache[m] = self.functional(_mono(m, self.ring))
        return hit

    def on_terms(self, terms: dict):
        total = self.ring.zero
        for m, c in terms.items():
            if self.support is None or self.support(m.grading):
                total = total + c * self.on_monomial(m)
        return total

    def __call__(self, x: AlgebraElement):
        return self.on_terms(x.terms)

    def on_product(self, m1: MonomialA, m2: MonomialA):
        """tau(m1 m2), cached."""
        key = (m1, m2)
        hit = self._pair_cache.get(key)
        if hit is None:
            hit = self._pair_cache[key] = self.on_terms(monomial_product(m1, m2, self.ring))
        return hit

    def twisted_trace_report(self, degree: int = 3) -> CheckReport:
        ring = self.ring
        monos = [_mono(m, ring) for m in monomials_up_to(degree)]

        def pairs():
            for x in monos:
                for y in monos:
                    yield (x, y), self(x * y), self(self.alpha(y) * x)

        witness = _first_mismatch(pairs())
        return CheckReport(f"{self.name}.twisted_trace", witness is None, {"degree": degree},
                           checked=len(monos) ** 2, witness=witness)

    def invariance_report(self, sigma=None, degree: int = 3, label="sigma_L") -> CheckReport:
        sigma = sigma or sigma_L(self.ring)
        monos = [_mono(m, self.ring) for m in monomials_up_to(degree)]
        witness = _first_mismatch((x, self(sigma(x)), self(x)) for x in monos)
        return CheckReport(f"{self.name}.{label}_invariant", witness is None, {"degree": degree},
                           checked=len(monos), witness=witness)

    def require(self, degree: int = 3):
        rep = self.twisted_trace_report(degree)
        if not rep.passed:
            raise PreconditionError("tau(x y) = tau(alpha(y) x)", rep.witness)
        rep = self.invariance_report(degree=degree)
        if not rep.passed:
            raise PreconditionError("tau(sigma_L(x)) = tau(x)", rep.witness)

    def describe(self) -> dict:
        return {"name": self.name, "alpha": _auto_params(self.alpha), **self.params}


def _zero_grading(g) -> bool:
    return g == (0, 0)


def derive_modular_parameters(q0="1/2", ring=EXACT, verify_degree: int = 4):
    """Exact (lam_h, mu_h) with h(xy) = h(alpha(y) x) for the diagonal alpha.

    The generator pairs give lam_h^(2m(y)) mu_h^(2n(y)) = h(xy)/h(yx); the
    log-linear system is solved at q0, the exponents are rounded to powers
    of q^(1/2) and the result is re-verified exactly on monomial pairs.
    """
    q0 = parse_rational(q0)
    gens = generators(ring)
    rows, rhs = [], []
    for x, y in itertools.product("abcd", repeat=2):
        hxy = eval_numeric(haar_state(gens[x] * gens[y]), q0)
        hyx = eval_numeric(haar_state(gens[y] * gens[x]), q0)
        if hxy == 0 or hyx == 0:
            continue
        ratio = hxy / hyx
        if ratio <= 0:
            raise ModularParameterError(f"h({x}{y})/h({y}{x}) is not positive")
        m2, n2 = next(iter(gens[y].terms)).grading
        rows.append([m2, n2])
        rhs.append(math.log(ratio))
    A, B = np.array(rows, dtype=float), np.array(rhs)
    if np.linalg.matrix_rank(A) < 2:
        raise ModularParameterError("generator pairs do not determine alpha")
    sol = np.linalg.lstsq(A, B, rcond=None)[0]
    # lam_h = q^(e/2) = v^e
    v_exp = sol / (0.5 * math.log(float(q0)))
    rounded = np.rint(v_exp)
    if np.max(np.abs(v_exp - rounded)) > 1e-8:
        raise ModularParameterError(f"no q-power solution (exponents {v_exp.tolist()})")
    lam_h, mu_h = ring.v_pow(int(rounded[0])), ring.v_pow(int(rounded[1]))
    alpha = DiagonalAutomorphism(lam_h, mu_h, ring)
    trial = TwistedTrace(haar_state, alpha, ring=ring, name="h", support=_zero_grading, verify=False)
    rep = trial.twisted_trace_report(verify_degree)
    if not rep.passed:
        raise ModularParameterError(f"rounded parameters fail exactly at {rep.witness}")
    return lam_h, mu_h


_haar_alpha: dict = {}


def _modular_automorphism(ring) -> DiagonalAutomorphism:
    hit = _haar_alpha.get(id(ring))
    if hit is None:
        hit = _haar_alpha[id(ring)] = DiagonalAutomorphism(*derive_modular_parameters(ring=ring), ring)
    return hit


def haar_trace(ring=EXACT, twist: DiagonalAutomorphism | None = None, check_degree=3, verify=True) -> TwistedTrace:
    """tau = h o twist (h itself when twist is None), with the derived alpha."""
    alpha = _modular_automorphism(ring)
    if twist is None:
        return TwistedTrace(haar_state, alpha, ring=ring, name="h", params={"kind": "haar"},
                            support=_zero_grading, check_degree=check_degree, verify=verify)

    def functional(x):
        return haar_state(twist(x))

    params = {"kind": "haar_twisted", "twist": _auto_params(twist)}
    return TwistedTrace(functional, alpha, ring=ring, name="h_twisted", params=params,
                        support=_zero_grading, check_degree=check_degree, verify=verify)


def random_haar_twists(count: int = 3, seed: int = 0, ring=EXACT, max_exp: int = 6) -> list:
    """Diagonal automorphisms with seeded rational q-power parameters r * v^e."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        params = []
        for _ in range(2):
            r = ring(parse_rational(f"{rng.randint(1, 5)}/{rng.randint(1, 5)}"))
            params.append(r * ring.v_pow(rng.randint(-max_exp, max_exp)))
        out.append(DiagonalAutomorphism(*params, ring))
    return out


def counit_trace(ring=EXACT) -> TwistedTrace:
    """The counit: a trace (alpha = id) that is not sigma_L-invariant.  Built
    unverified so that the precondition path can be exercised downstream."""
    ident = DiagonalAutomorphism(1, 1, ring)
    return TwistedTrace(counit, ident, ring=ring, name="counit", params={"kind": "counit"}, verify=False)


# ---------------------------------------------------------------------------
# cochains
# ---------------------------------------------------------------------------


class TwistedCochain:
    """A multilinear functional of the given arity with twist sigma.

    mono_eval maps a tuple of MonomialA to a scalar.  grading_ok, when set,
    is a predicate on the total (2m, 2n) grading of a tuple; tuples failing
    it evaluate to zero without calling mono_eval.
    """

    def __init__(self, arity: int, mono_eval, sigma, ring=EXACT, *, name="phi", grading_ok=None, data=None):
        self.arity = arity
        self._eval = mono_eval
        self.sigma = sigma
        self.ring = ring
        self.name = name
        self.grading_ok = grading_ok
        self.data = data or {}
        self._cache: dict = {}

    def on_monomials(self, monos: tuple):
        if self.grading_ok is not None and not self.grading_ok(_total_grading(monos)):
            return self.ring.zero
        hit = self._cache.get(monos)
        if hit is None:
            hit = self._cache[monos] = self._eval(monos)
        return hit

    def __call__(self, *xs):
        if len(xs) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} arguments, got {len(xs)}")
        ring = self.ring
        elems = [_mono(x, ring) if isinstance(x, tuple) else x for x in xs]
        total = ring.zero
        for combo in itertools.product(*(list(x.terms.items()) for x in elems)):
            monos = tuple(m for m, _ in combo)
            val = self.on_monomials(monos)
            if val != ring.zero:
                c = ring.one
                for _, cm in combo:
                    c = c * cm
                total = total + c * val
        return total

    def equivariance_report(self, tuples) -> CheckReport:
        """phi(sigma x0, ..., sigma xn) = phi(x0, ..., xn) on the given monomial tuples."""
        ring = self.ring
        checked = 0
        for monos in tuples:
            checked += 1
            xs = [_mono(m, ring) for m in monos]
            if self(*(self.sigma(x) for x in xs)) != self.on_monomials(tuple(monos)):
                return CheckReport(f"{self.name}.equivariance", False, checked=checked, witness=monos)
        return CheckReport(f"{self.name}.equivariance", True, checked=checked)


def coboundary(phi: TwistedCochain) -> TwistedCochain:
    """b_sigma(phi), of arity phi.arity + 1."""
    ring, sigma, n1 = phi.ring, phi.sigma, phi.arity

    def ev(b):
        out = ring.zero
        for i in range(n1):
            prod = AlgebraElement._wrap(monomial_product(b[i], b[i + 1], ring), ring)
            args = [_mono(m, ring) for m in b[:i]] + [prod] + [_mono(m, ring) for m in b[i + 2:]]
            val = phi(*args)
            out = out + val if i % 2 == 0 else out - val
        first = sigma(_mono(b[-1], ring)) * _mono(b[0], ring)
        val = phi(first, *(_mono(m, ring) for m in b[1:-1]))
        return out + val if n1 % 2 == 0 else out - val

    # products and a diagonal twist keep the total grading
    ok = phi.grading_ok if isinstance(sigma, DiagonalAutomorphism) else None
    return TwistedCochain(n1 + 1, ev, sigma, ring, name=f"b({phi.name})", grading_ok=ok)


def combine(terms, name="sum") -> TwistedCochain:
    """sum_i c_i phi_i for cochains of equal arity and twist."""
    terms = [(c, p) for c, p in terms]
    first = terms[0][1]
    ring = first.ring
    oks = [p.grading_ok for _, p in terms]
    ok = None
    if all(f is not None for f in oks):
        ok = lambda g: any(f(g) for f in oks)  # noqa: E731

    def ev(monos):
        total = ring.zero
        for c, p in terms:
            total = total + c * p.on_monomials(monos)
        return total

    return TwistedCochain(first.arity, ev, first.sigma, ring, name=name, grading_ok=ok)


def random_cochain(arity: int, sigma: DiagonalAutomorphism, seed: int = 0, ring=EXACT, name="random") -> TwistedCochain:
    """Seeded random rational values on monomial tuples, supported where sigma
    acts trivially so that phi o sigma = phi."""

    def ok(g):
        return sigma.factor(*g) == ring.one

    def ev(monos):
        rng = random.Random(f"{seed}:{monos}")
        return ring(parse_rational(f"{rng.randint(-9, 9)}/{rng.randint(1, 9)}"))

    return TwistedCochain(arity, ev, sigma, ring, name=name, grading_ok=ok)


# ---------------------------------------------------------------------------
# derivations and local cochains
# ---------------------------------------------------------------------------


@dataclass
class DerivationSpec:
    """A sigma_L-type twisted derivation d(xy) = d(x) y + theta(x) d(y); for
    kind 'inner', d(x) = Y x - theta(x) Y.  shift is the (2m, 2n) grading
    change when known."""

    name: str
    apply: object
    theta: DiagonalAutomorphism
    kind: str = "twisted"
    Y: AlgebraElement | None = None
    shift: tuple | None = None
    _cache: dict = field(default_factory=dict, repr=False)
    _verified: dict = field(default_factory=dict, repr=False)

    @classmethod
    def inner(cls, Y: AlgebraElement, theta: DiagonalAutomorphism, name: str = "inner") -> DerivationSpec:
        grads = Y.gradings()
        shift = next(iter(grads)) if len(grads) == 1 else ((0, 0) if Y.is_zero() else None)

        def apply(x):
            return Y * x - theta(x) * Y

        return cls(name, apply, theta, "inner", Y, shift)

    def on_monomial(self, m: MonomialA, power: int = 0) -> AlgebraElement:
        """d(theta^-power(m)), cached."""
        key = (m, power)
        hit = self._cache.get(key)
        if hit is None:
            x = _mono(m, self.theta.ring)
            if power:
                x = self.theta.power(-power)(x)
            hit = self._cache[key] = self.apply(x)
        return hit

    def verify(self, degree: int = 2) -> CheckReport:
        hit = self._verified.get(degree)
        if hit is not None:
            return hit
        ring = self.theta.ring
        monos = [_mono(m, ring) for m in monomials_up_to(degree)]
        witness, label = None, "twisted_leibniz"
        if self.kind == "inner":
            label = "inner_formula"
            witness = _first_mismatch((x, self.apply(x), self.Y * x - self.theta(x) * self.Y) for x in monos)
        if witness is None:
            label = "twisted_leibniz"
            witness = _first_mismatch(
                ((x, y), self.apply(x * y), self.apply(x) * y + self.theta(x) * self.apply(y))
                for x in monos for y in monos
            )
        rep = CheckReport(f"{self.name}.{label}", witness is None, {"degree": degree},
                          checked=len(monos) ** 2, witness=witness)
        self._verified[degree] = rep
        return rep


_std_derivations: dict = {}


def standard_derivations(engine: LeftActionEngine | None = None) -> dict:
    """{1: del1, 2: del2 (inner, Y = -1), 3: del3} with theta = sigma_L."""
    engine = engine or default_engine()
    hit = _std_derivations.get(id(engine))
    if hit is None:
        ring = engine.ring
        theta = engine.sigma
        d2 = DerivationSpec("del2", engine.del2, theta, "inner", AlgebraElement.scalar(-1, ring), (0, 0))
        hit = {
            1: DerivationSpec("del1", engine.del1, theta, shift=(0, 2)),
            2: d2,
            3: DerivationSpec("del3", engine.del3, theta, shift=(0, -2)),
        }
        _std_derivations[id(engine)] = hit
    return hit


class _Chain:
    """tau(x0 F_1 ... F_r) where each factor either consumes the next argument
    (('arg', spec, power) -> spec.on_monomial(x, power)) or is a constant
    (('const', Y)).  Suffix products are memoised."""

    def __init__(self, tau: TwistedTrace, factors: list):
        self.tau = tau
        self.factors = factors
        self.ring = tau.ring
        self._suffix: dict = {}
        self._one = AlgebraElement.scalar(1, self.ring)

    def suffix(self, idx: int, monos: tuple) -> AlgebraElement:
        if idx == len(self.factors):
            return self._one
        key = (idx, monos)
        hit = self._suffix.get(key)
        if hit is not None:
            return hit
        fac = self.factors[idx]
        if fac[0] == "const":
            val = fac[1] * self.suffix(idx + 1, monos)
        else:
            head = fac[1].on_monomial(monos[0], fac[2])
            val = head if head.is_zero() else head * self.suffix(idx + 1, monos[1:])
        self._suffix[key] = val
        return val

    def __call__(self, monos: tuple):
        R = self.suffix(0, monos[1:])
        total = self.ring.zero
        for nu, c in R.terms.items():
            total = total + c * self.tau.on_product(monos[0], nu)
        return total


def _shift_filter(tau: TwistedTrace, shifts):
    if tau.support is None or any(s is None for s in shifts):
        return None
    dm = sum(s[0] for s in shifts)
    dn = sum(s[1] for s in shifts)
    return lambda g: tau.support((g[0] + dm, g[1] + dn))


def _tuples_for(arity: int, degree: int):
    return itertools.product(monomials_up_to(degree), repeat=arity)


def build_local_cochain(tau: TwistedTrace, derivs: list, check_degree: int = 2, tuple_degree: int = 1,
                        name: str | None = None) -> TwistedCochain:
    """phi(x0, ..., xn) = tau(x0 d_1(theta^-1 x1) ... d_n(theta^-n xn)), twist
    sigma = alpha o theta^-n.  The hypotheses are verified first: theta and
    alpha commute, tau(sigma x) = tau(x), each d_i is a theta-twisted
    derivation (or matches its inner formula), and d_1(sigma x1)...d_n(sigma xn)
    = sigma(d_1(x1)...d_n(xn)) on monomial tuples of degree <= tuple_degree."""
    n = len(derivs)
    if n == 0:
        raise ValueError("at least one derivation is required")
    ring = tau.ring
    theta = derivs[0].theta
    if any(d.theta != theta for d in derivs):
        raise PreconditionError("all derivations share one twist theta")
    alpha = tau.alpha
    monos = [_mono(m, ring) for m in monomials_up_to(check_degree)]

    w = _first_mismatch((x, theta(alpha(x)), alpha(theta(x))) for x in monos)
    if w is not None:
        raise PreconditionError("theta o alpha = alpha o theta", w)
    sigma = _compose(alpha, theta.power(-n))
    w = _first_mismatch((x, tau(sigma(x)), tau(x)) for x in monos)
    if w is not None:
        raise PreconditionError("tau(sigma(x)) = tau(x)", w)
    for d in derivs:
        rep = d.verify(check_degree)
        if not rep.passed:
            raise PreconditionError(rep.check, rep.witness)
    w = _invariance_witness([("arg", d) for d in derivs], sigma, ring, tuple_degree)
    if w is not None:
        raise PreconditionError("d_1(sigma x_1)...d_n(sigma x_n) = sigma(d_1(x_1)...d_n(x_n))", w)

    chain = _Chain(tau, [("arg", d, i + 1) for i, d in enumerate(derivs)])
    label = name or "phi[" + ",".join(d.name for d in derivs) + "]"
    data = {"tau": tau, "derivs": list(derivs), "theta": theta, "sigma": sigma}
    return TwistedCochain(n + 1, chain, sigma, ring, name=label,
                          grading_ok=_shift_filter(tau, [d.shift for d in derivs]), data=data)


def _invariance_witness(slots, sigma, ring, degree):
    """First monomial tuple violating sigma(prod F_i) = prod F_i(sigma) where
    slots are ('arg', d) or ('const', Y)."""
    args = sum(1 for s in slots if s[0] == "arg")
    one = AlgebraElement.scalar(1, ring)
    for monos in _tuples_for(args, degree):
        xs = [_mono(m, ring) for m in monos]
        lhs, rhs, k = one, one, 0
        for s in slots:
            if s[0] == "const":
                lhs, rhs = lhs * s[1], rhs * s[1]
            else:
                lhs = lhs * s[1].apply(xs[k])
                rhs = rhs * s[1].apply(sigma(xs[k]))
                k += 1
        if sigma(lhs) != rhs:
            return monos
    return None


def transgress(phi: TwistedCochain, j: int, Y: AlgebraElement | None = None, tuple_degree: int = 1) -> TwistedCochain:
    """phi_j for a local cochain phi whose j-th derivation (1-based) is inner:
    the factor d_j(theta^-j x_j) is replaced by Y and later arguments move
    down one slot.  b_sigma(phi_j) = (-1)^j phi."""
    data = phi.data
    if "derivs" not in data:
        raise ValueError("transgress needs a cochain from build_local_cochain")
    derivs, tau, sigma = data["derivs"], data["tau"], data["sigma"]
    n = len(derivs)
    if not 1 <= j <= n:
        raise ValueError(f"j must lie in 1..{n}")
    dj = derivs[j - 1]
    if Y is None:
        if dj.kind != "inner":
            raise PreconditionError(f"d_{j} is an inner twisted derivation")
        Y = dj.Y
    ring = tau.ring
    monos = [_mono(m, ring) for m in monomials_up_to(2)]
    w = _first_mismatch((x, dj.apply(x), Y * x - dj.theta(x) * Y) for x in monos)
    if w is not None:
        raise PreconditionError(f"d_{j}(x) = Y x - theta(x) Y", w)
    slots = [("arg", d) for d in derivs[: j - 1]] + [("const", Y)] + [("arg", d) for d in derivs[j:]]
    w = _invariance_witness(slots, sigma, ring, tuple_degree)
    if w is not None:
        raise PreconditionError("invariance of d_1...Y...d_n under sigma", w)

    factors = [("arg", d, i + 1) for i, d in enumerate(derivs[: j - 1])] + [("const", Y)]
    factors += [("arg", d, i + 1) for i, d in enumerate(derivs) if i >= j]
    grads = Y.gradings()
    yshift = next(iter(grads)) if len(grads) == 1 else ((0, 0) if Y.is_zero() else None)
    shifts = [d.shift for i, d in enumerate(derivs) if i != j - 1] + [yshift]
    chain = _Chain(tau, factors)
    return TwistedCochain(n, chain, sigma, ring, name=f"{phi.name}_{j}",
                          grading_ok=_shift_filter(tau, shifts), data={"parent": phi, "j": j, "Y": Y})


# ---------------------------------------------------------------------------
# the Dirac cochain
# ---------------------------------------------------------------------------


class _MatrixChain:
    """tau o Tr(x0 M_1(x1) ... M_r(xr)) with M_i(x) = [D_q, sigma_L^-i(x)]_{sigma_L}."""

    def __init__(self, tau: TwistedTrace, r: int, engine: LeftActionEngine):
        self.tau, self.r, self.engine = tau, r, engine
        self.ring = tau.ring
        self._factor: dict = {}
        self._suffix: dict = {}
        one = AlgebraElement.scalar(1, self.ring)
        zero = AlgebraElement.scalar(0, self.ring)
        self._id = BlockOperator2x2(one, zero, zero, one)

    def factor(self, i: int, m: MonomialA) -> BlockOperator2x2:
        key = (i, m)
        hit = self._factor.get(key)
        if hit is None:
            x = self.engine.sigma.power(-i)(_mono(m, self.ring))
            hit = self._factor[key] = twisted_commutator_symbolic(x, self.engine)
        return hit

    def suffix(self, idx: int, monos: tuple) -> BlockOperator2x2:
        if idx > self.r:
            return self._id
        key = (idx, monos)
        hit = self._suffix.get(key)
        if hit is None:
            head = self.factor(idx, monos[0])
            hit = head if head.is_zero() else head @ self.suffix(idx + 1, monos[1:])
            self._suffix[key] = hit
        return hit

    def __call__(self, monos: tuple):
        P = self.suffix(1, monos[1:]).trace()
        total = self.ring.zero
        for nu, c in P.terms.items():
            total = total + c * self.tau.on_product(monos[0], nu)
        return total


def _dirac_twist(tau: TwistedTrace, k: int, engine):
    return _compose(tau.alpha, engine.sigma.power(-(2 * k + 1)))


def build_dirac_cochain(tau: TwistedTrace, k: int = 1, engine: LeftActionEngine | None = None) -> TwistedCochain:
    """phi(x0, ..., x_{2k+1}) = (tau o Tr)(x0 prod_i [D_q, sigma_L^-i(x_i)]_{sigma_L}),
    twist alpha o sigma_L^-(2k+1)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    engine = engine or default_engine(tau.ring)
    r = 2 * k + 1
    chain = _MatrixChain(tau, r, engine)
    ok = tau.support if tau.support is not None else None
    return TwistedCochain(r + 1, chain, _dirac_twist(tau, k, engine), tau.ring,
                          name=f"phi_D[k={k}]", grading_ok=ok, data={"tau": tau, "k": k})


def dirac_words(k: int = 1, ring=EXACT) -> list:
    """(word, coefficient) with phi_D = sum_w coefficient * phi_w, where phi_w
    uses derivations del_{w_1}, ..., del_{w_r}.  The twisted commutator is
    kappa del2 Z + v del3 E12 + v^-1 del1 E21 with kappa = (q - q^-1)^-1."""
    r = 2 * k + 1
    mats = {1: np.array([[0, 0], [1, 0]]), 2: np.array([[1, 0], [0, -1]]), 3: np.array([[0, 1], [0, 0]])}
    kappa = ring.one / (ring.q_pow(1) - ring.q_pow(-1))
    out = []
    for word in itertools.product((1, 2, 3), repeat=r):
        P = np.eye(2, dtype=int)
        for w in word:
            P = P @ mats[w]
        tr = int(np.trace(P))
        if tr == 0:
            continue
        # nonzero trace forces equal numbers of del1 and del3, so the v's cancel
        out.append((word, kappa ** word.count(2) * tr))
    return out


def _local_for_word(tau, word, engine, cache):
    hit = cache.get(word)
    if hit is None:
        ds = standard_derivations(engine)
        hit = cache[word] = build_local_cochain(tau, [ds[w] for w in word])
    return hit


def dirac_decomposition(tau: TwistedTrace, k: int = 1, engine=None) -> tuple:
    """(sum_w c_w phi_w, {word: phi_w})."""
    engine = engine or default_engine(tau.ring)
    locals_: dict = {}
    terms = [(c, _local_for_word(tau, w, engine, locals_)) for w, c in dirac_words(k, tau.ring)]
    return combine(terms, name=f"sum_w phi_w[k={k}]"), locals_


def dirac_transgression(tau: TwistedTrace, k: int = 1, engine=None) -> tuple:
    """(psi, parts) with b_sigma(psi) = phi_D; psi = sum_w c_w (-1)^j(w) phi_w,j(w),
    j(w) the first position of del2 in w.  parts maps word -> (j, phi_w, psi_w)."""
    engine = engine or default_engine(tau.ring)
    locals_: dict = {}
    parts, terms = {}, []
    for w, c in dirac_words(k, tau.ring):
        j = w.index(2) + 1
        phi_w = _local_for_word(tau, w, engine, locals_)
        psi_w = transgress(phi_w, j)
        parts[w] = (j, phi_w, psi_w)
        terms.append((c if j % 2 == 0 else -c, psi_w))
    return combine(terms, name=f"psi[k={k}]"), parts


# ---------------------------------------------------------------------------
# tuple sets and checks
# ---------------------------------------------------------------------------


def exhaustive_tuples(arity: int, degree: int) -> list:
    return list(itertools.product(monomials_up_to(degree), repeat=arity))


def balanced_tuples(arity: int, degree, count: int, seed: int = 0, target=(0, 0)) -> list:
    """Seeded tuples of monomials whose total grading is `target` (the only
    gradings on which the cochains here can be nonzero).  `degree` is the
    exact degree of every entry, or a sequence of per-slot degrees."""
    degrees = list(degree) if isinstance(degree, (list, tuple)) else [degree] * arity
    if len(degrees) != arity:
        raise ValueError("need one degree per slot")
    rng = random.Random(seed)
    pools = [monomials_of_degree(d) for d in degrees]
    by_grading: dict = {}
    for m in pools[-1]:
        by_grading.setdefault(m.grading, []).append(m)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 1000 * (count + 1):
            raise ValueError(f"no balanced {arity}-tuples of degrees {degrees} reach grading {target}")
        head = [rng.choice(pool) for pool in pools[:-1]]
        g = _total_grading(head)
        need = (target[0] - g[0], target[1] - g[1])
        if need in by_grading:
            out.append(tuple(head) + (rng.choice(by_grading[need]),))
    return out


def workers_from_env(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("QSU2_WORKERS", default)))
    except ValueError:
        return default


_JOB = None


def _run_chunk(bounds):
    lhs, rhs, tuples = _JOB
    for i in range(*bounds):
        t = tuples[i]
        if lhs(t) != rhs(t):
            return i
    return None


def _first_failure(lhs, rhs, tuples, workers: int):
    global _JOB
    if workers <= 1 or len(tuples) < 4000 or "fork" not in multiprocessing.get_all_start_methods():
        for i, t in enumerate(tuples):
            if lhs(t) != rhs(t):
                return i
        return None
    _JOB = (lhs, rhs, tuples)
    step = -(-len(tuples) // (4 * workers))
    chunks = [(s, min(s + step, len(tuples))) for s in range(0, len(tuples), step)]
    try:
        with multiprocessing.get_context("fork").Pool(workers) as pool:
            hits = [h for h in pool.map(_run_chunk, chunks) if h is not None]
    finally:
        _JOB = None
    return min(hits) if hits else None


def check_identity(identity: str, lhs, rhs, tuples, workers: int | None = None) -> CheckReport:
    """Pointwise lhs(t) == rhs(t); lhs and rhs are cochains or callables on
    monomial tuples."""
    workers = workers_from_env() if workers is None else workers
    f = lhs.on_monomials if isinstance(lhs, TwistedCochain) else lhs
    g = rhs.on_monomials if isinstance(rhs, TwistedCochain) else rhs
    tuples = list(tuples)
    bad = _first_failure(f, g, tuples, workers)
    return CheckReport(identity, bad is None, checked=len(tuples),
                       witness=None if bad is None else tuples[bad])


def check_zero(identity: str, phi: TwistedCochain, tuples, workers: int | None = None) -> CheckReport:
    zero = phi.ring.zero
    return check_identity(identity, phi, lambda t: zero, tuples, workers)


def _scaled(phi: TwistedCochain, c):
    return lambda t: c * phi.on_monomials(t)


# ---------------------------------------------------------------------------
# the certificate
# ---------------------------------------------------------------------------


_PERMS = list(itertools.permutations((1, 2, 3)))


def _sign(p) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inv % 2 else 1


def triviality_certificate(tau: TwistedTrace, degree: int = 2, samples: int = 100, seed: int = 0,
                           engine: LeftActionEngine | None = None, workers: int | None = None) -> dict:
    """Exhibit phi_D (k = 1) as the coboundary b_sigma(psi), sigma = alpha o sigma_L^-3.

    For each s in S_3, psi_s transgresses phi_s at the slot j(s) of del2 and
    b_sigma(psi_s) = (-1)^j(s) phi_s is checked; then the decomposition
    phi_D = sum_s sgn(s) kappa phi_s and b_sigma(psi) = phi_D for the assembled
    psi = sum_s sgn(s) kappa (-1)^j(s) psi_s.  Tuples: all monomial 4-tuples
    of degree <= degree plus `samples` seeded balanced degree-(degree+1) tuples.
    """
    ring = tau.ring
    engine = engine or default_engine(ring)
    tau.require()
    kappa = ring.one / (ring.q_pow(1) - ring.q_pow(-1))
    ds = standard_derivations(engine)
    tuples = exhaustive_tuples(4, degree) + balanced_tuples(4, degree + 1, samples, seed)

    phi = build_dirac_cochain(tau, 1, engine)
    checks, parts, psi_terms, phi_terms = [], [], [], []
    for s in _PERMS:
        phi_s = build_local_cochain(tau, [ds[i] for i in s])
        j = s.index(2) + 1
        psi_s = transgress(phi_s, j)
        sgn = (-1) ** j
        rep = check_identity(f"b_sigma(psi_s) = (-1)^j phi_s [s={''.join(map(str, s))}, j={j}]",
                             coboundary(psi_s), _scaled(phi_s, ring(sgn)), tuples, workers)
        checks.append(rep)
        c = kappa * _sign(s)
        phi_terms.append((c, phi_s))
        psi_terms.append((c * sgn, psi_s))
        parts.append(phi_s)
    checks.append(check_identity("phi = sum_s sgn(s) (q - q^-1)^-1 phi_s", phi,
                                 combine(phi_terms), tuples, workers))
    psi = combine(psi_terms, name="psi")
    checks.append(check_identity("b_sigma(psi) = phi", coboundary(psi), phi, tuples, workers))
    return {
        "tau_params": tau.describe(),
        "sigma_params": _auto_params(phi.sigma),
        "checks": [
            {"identity": r.check, "tuples_checked": r.checked, "status": r.status,
             **({"witness": [str(m) for m in r.witness]} if r.witness is not None else {})}
            for r in checks
        ],
        "passed": all(r.passed for r in checks),
    }
