"""The left action of U_q(su2) on O(SU_q(2)).

Generator table, with gauge rho:

    k: a -> q^(1/2) a,  b -> q^(-1/2) b,  c -> q^(1/2) c,  d -> q^(-1/2) d
    e: a, c -> 0,       b -> rho a,       d -> rho c
    f: b, d -> 0,       a -> rho^-1 b,    c -> rho^-1 d

extended to products by

    e(xy) = e(x) k^-1(y) + k(x) e(y),   f(xy) = f(x) k^-1(y) + k(x) f(y)

and to U by composition.  On an (m, n)-homogeneous x, k acts as q^-n.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coordinate_algebra import (
    AlgebraElement,
    DiagonalAutomorphism,
    MonomialA,
    monomials_up_to,
)
from .enveloping_algebra import UElement
from .scalars import EXACT

__all__ = ["LeftActionEngine", "LeibnizReport", "sigma_L", "default_engine"]


@dataclass
class LeibnizReport:
    name: str
    twisted: bool
    checked: int
    passed: bool
    witness: tuple | None = None

    def as_dict(self) -> dict:
        return {
            "check": f"leibniz[{self.name}]",
            "twisted": self.twisted,
            "checked": self.checked,
            "status": "pass" if self.passed else "fail",
            "witness": None if self.witness is None else [str(w) for w in self.witness],
        }


def sigma_L(ring=EXACT) -> DiagonalAutomorphism:
    """The left modular automorphism d_{k^2}: scales (m, n) components by q^(-2n)."""
    return DiagonalAutomorphism(ring.one, ring.q_pow(-1), ring)


class LeftActionEngine:
    def __init__(self, gauge_rho=1, ring=EXACT):
        self.ring = ring
        self.gauge_rho = ring(gauge_rho)
        if self.gauge_rho == ring.zero:
            raise ValueError("gauge_rho must be nonzero")
        self.sigma = sigma_L(ring)
        self._e_cache: dict = {}
        self._f_cache: dict = {}
        rho, one = self.gauge_rho, ring.one
        z = AlgebraElement._wrap({}, ring)
        mono = lambda t, s: AlgebraElement.monomial(t, s, ring)
        self._e_gen = {"a": z, "c": z, "b": mono((1, 0, 0), rho), "d": mono((0, 0, 1), rho)}
        self._f_gen = {"b": z, "d": z, "a": mono((0, 1, 0), one / rho), "c": mono((-1, 0, 0), one / rho)}

    # -- k ------------------------------------------------------------------
    def k_power(self, x: AlgebraElement, p: int = 1) -> AlgebraElement:
        """d_{k^p}: multiplies the n-component by q^(-p n) = v^(-p * 2n)."""
        ring = self.ring
        return AlgebraElement._wrap(
            {m: c * ring.v_pow(-p * m.grading[1]) for m, c in x.terms.items()}, ring
        )

    # -- e and f -------------------------------------------------------------
    def _first_and_rest(self, m: MonomialA):
        i, j, k = m
        if i > 0:
            return "a", MonomialA(i - 1, j, k)
        if i < 0:
            return "d", MonomialA(i + 1, j, k)
        if j > 0:
            return "b", MonomialA(0, j - 1, k)
        return "c", MonomialA(0, 0, k - 1)

    def _derivation_monomial(self, m: MonomialA, table: dict, cache: dict) -> AlgebraElement:
        hit = cache.get(m)
        if hit is not None:
            return hit
        ring = self.ring
        if m.degree == 0:
            out = AlgebraElement._wrap({}, ring)
        else:
            g, rest = self._first_and_rest(m)
            g_mono = {"a": (1, 0, 0), "d": (-1, 0, 0), "b": (0, 1, 0), "c": (0, 0, 1)}[g]
            g_el = AlgebraElement.monomial(g_mono, 1, ring)
            rest_el = AlgebraElement.monomial(rest, 1, ring)
            n2_g = MonomialA(*g_mono).grading[1]
            n2_rest = rest.grading[1]
            # X(g rest) = X(g) k^-1(rest) + k(g) X(rest)
            out = (table[g] * rest_el).scale(ring.v_pow(n2_rest))
            out = out + (g_el * self._derivation_monomial(rest, table, cache)).scale(ring.v_pow(-n2_g))
        cache[m] = out
        return out

    def _apply(self, x: AlgebraElement, table, cache) -> AlgebraElement:
        out = AlgebraElement._wrap({}, x.ring)
        for m, c in x.terms.items():
            out = out + self._derivation_monomial(m, table, cache).scale(c)
        return out

    def e(self, x: AlgebraElement) -> AlgebraElement:
        return self._apply(x, self._e_gen, self._e_cache)

    def f(self, x: AlgebraElement) -> AlgebraElement:
        return self._apply(x, self._f_gen, self._f_cache)

    def k(self, x: AlgebraElement) -> AlgebraElement:
        return self.k_power(x, 1)

    def kinv(self, x: AlgebraElement) -> AlgebraElement:
        return self.k_power(x, -1)

    # -- general --------------------------------------------------------------
    def act(self, g: UElement, x: AlgebraElement) -> AlgebraElement:
        """d_g(x); d_{f^i k^j e^m} = d_f^i o d_k^j o d_e^m."""
        out = AlgebraElement._wrap({}, x.ring)
        for mono, coeff in g.terms.items():
            y = x
            for _ in range(mono.e):
                y = self.e(y)
            y = self.k_power(y, mono.k)
            for _ in range(mono.f):
                y = self.f(y)
            out = out + y.scale(coeff)
        return out

    def sigma_L(self, x: AlgebraElement) -> AlgebraElement:
        return self.sigma(x)

    def sigma_L_inverse(self, x: AlgebraElement) -> AlgebraElement:
        return self.sigma.inverse()(x)

    def sigma_L_power(self, x: AlgebraElement, p: int) -> AlgebraElement:
        return self.sigma.power(p)(x)

    def del1(self, x: AlgebraElement) -> AlgebraElement:
        """d_{fk}."""
        return self.f(self.k(x))

    def del2(self, x: AlgebraElement) -> AlgebraElement:
        """d_{k^2 - 1} = sigma_L - id."""
        return self.sigma(x) - x

    def del3(self, x: AlgebraElement) -> AlgebraElement:
        """d_{ek}."""
        return self.e(self.k(x))

    def derivation(self, index: int):
        return {1: self.del1, 2: self.del2, 3: self.del3}[index]

    def verify_twisted_leibniz(self, d, sample_degree: int, twisted: bool = True, name: str = "") -> LeibnizReport:
        """Check d(xy) = d(x) y + s(x) d(y) over all monomial pairs of degree
        <= sample_degree, with s = sigma_L (twisted) or the identity."""
        ring = self.ring
        monos = [AlgebraElement.monomial(m, 1, ring) for m in monomials_up_to(sample_degree)]
        checked = 0
        for x in monos:
            sx = self.sigma(x) if twisted else x
            dx = d(x)
            for y in monos:
                checked += 1
                if d(x * y) != dx * y + sx * d(y):
                    return LeibnizReport(name or getattr(d, "__name__", "d"), twisted, checked, False, (x, y))
        return LeibnizReport(name or getattr(d, "__name__", "d"), twisted, checked, True)


_default: dict = {}


def default_engine(ring=EXACT) -> LeftActionEngine:
    eng = _default.get(id(ring))
    if eng is None:
        eng = _default[id(ring)] = LeftActionEngine(1, ring)
    return eng
