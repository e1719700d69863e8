"""U_q(su2) as a PBW engine with normal form f^i k^j e^m.

Relations: k k^-1 = 1, ke = q ek, kf = q^-1 fk, ef - fe = (k^2 - k^-2)/(q - q^-1).
Involution: e* = f, k* = k.
"""

from __future__ import annotations

import json
from typing import NamedTuple

from .scalars import EXACT

__all__ = ["MonomialU", "UElement", "ugen", "multiply_u", "star_u", "casimir", "casimir_alt"]


class MonomialU(NamedTuple):
    f: int
    k: int
    e: int

    @property
    def degree(self) -> int:
        return self.f + abs(self.k) + self.e

    def __str__(self):
        parts = []
        if self.f:
            parts.append("f" if self.f == 1 else f"f^{self.f}")
        if self.k:
            parts.append("k" if self.k == 1 else f"k^{self.k}")
        if self.e:
            parts.append("e" if self.e == 1 else f"e^{self.e}")
        return "*".join(parts) or "1"


ONE_U = MonomialU(0, 0, 0)


class UElement:
    __slots__ = ("terms", "ring")

    def __init__(self, terms=None, ring=EXACT):
        self.ring = ring
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = ring(coeff)
                if coeff != ring.zero:
                    clean[MonomialU(*mono)] = coeff
        self.terms = clean

    @classmethod
    def _wrap(cls, terms, ring):
        obj = object.__new__(cls)
        obj.terms = terms
        obj.ring = ring
        return obj

    @classmethod
    def scalar(cls, value, ring=EXACT):
        return cls({ONE_U: value}, ring)

    def _other(self, other):
        if isinstance(other, UElement):
            if other.ring is not self.ring:
                raise TypeError("ring mismatch")
            return other
        return UElement.scalar(other, self.ring)

    def __add__(self, other):
        other = self._other(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            s = c if s is None else s + c
            if s == self.ring.zero:
                terms.pop(m, None)
            else:
                terms[m] = s
        return UElement._wrap(terms, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return UElement._wrap({m: -c for m, c in self.terms.items()}, self.ring)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) + (-self)

    def scale(self, s):
        s = self.ring(s)
        if s == self.ring.zero:
            return UElement._wrap({}, self.ring)
        return UElement._wrap({m: c * s for m, c in self.terms.items()}, self.ring)

    def __mul__(self, other):
        if not isinstance(other, UElement):
            return self.scale(other)
        return multiply_u(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        out = UElement.scalar(1, self.ring)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, UElement):
            return self.ring is other.ring and self.terms == other.terms
        return self.terms == UElement.scalar(other, self.ring).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        key = lambda m: (m.degree, m.f, m.k, m.e)
        return " + ".join(f"({self.terms[m]})*{m}" for m in sorted(self.terms, key=key))

    def to_json(self) -> list:
        key = lambda m: (m.degree, m.f, m.k, m.e)
        return [
            {"monomial": list(m), "coeff": self.terms[m].to_json()} for m in sorted(self.terms, key=key)
        ]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def ugen(name: str, ring=EXACT) -> UElement:
    mono = {"e": (0, 0, 1), "f": (1, 0, 0), "k": (0, 1, 0), "kinv": (0, -1, 0), "1": (0, 0, 0)}[name]
    return UElement({mono: 1}, ring)


_cache: dict = {}


def _e_times(mono: MonomialU, ring) -> dict:
    """Normal form of e * f^i k^j e^m."""
    i, j, m = mono
    one = ring.one
    kappa = one / (ring.q_pow(1) - ring.q_pow(-1))
    out = {MonomialU(i, j, m + 1): ring.q_pow(-j) if i == 0 else None}
    if i == 0:
        return out
    # e f^i = f^i e + f^(i-1) sum_t (q^(-2(i-1-t)) k^2 - q^(2(i-1-t)) k^-2)/(q - q^-1)
    out = {MonomialU(i, j, m + 1): ring.q_pow(-j)}
    plus = ring.zero
    minus = ring.zero
    for t in range(i):
        plus = plus + ring.q_pow(-2 * (i - 1 - t))
        minus = minus + ring.q_pow(2 * (i - 1 - t))
    out[MonomialU(i - 1, j + 2, m)] = plus * kappa
    out[MonomialU(i - 1, j - 2, m)] = -(minus * kappa)
    return {mm: c for mm, c in out.items() if c != ring.zero}


def _mono_product(m1: MonomialU, m2: MonomialU, ring) -> dict:
    key = (id(ring), m1, m2)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    i1, j1, e1 = m1
    i2, j2, e2 = m2
    if e1 == 0:
        # k^j f^i = q^(-ij) f^i k^j
        res = {MonomialU(i1 + i2, j1 + j2, e2): ring.q_pow(-j1 * i2)}
    elif i2 == 0:
        # e^m k^j = q^(-mj) k^j e^m
        res = {MonomialU(i1, j1 + j2, e1 + e2): ring.q_pow(-e1 * j2)}
    else:
        left = MonomialU(i1, j1, e1 - 1)
        res = {}
        for mm, c in _e_times(m2, ring).items():
            for mmm, cc in _mono_product(left, mm, ring).items():
                s = res.get(mmm, ring.zero) + c * cc
                res[mmm] = s
        res = {mm: c for mm, c in res.items() if c != ring.zero}
    _cache[key] = res
    return res


def multiply_u(x: UElement, y: UElement) -> UElement:
    ring = x.ring
    out: dict = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            c12 = c1 * c2
            for m, c in _mono_product(m1, m2, ring).items():
                s = out.get(m)
                out[m] = c12 * c if s is None else s + c12 * c
    return UElement._wrap({m: c for m, c in out.items() if c != ring.zero}, ring)


def star_u(x: UElement) -> UElement:
    """(f^i k^j e^m)* = f^m k^j e^i; coefficients are real."""
    return UElement._wrap({MonomialU(m.e, m.k, m.f): c for m, c in x.terms.items()}, x.ring)


def casimir(ring=EXACT) -> UElement:
    """c_q = ef + (q^-1 - q)^-2 (q^(1/2) k^-1 - q^(-1/2) k)^2."""
    e, f, k, kinv = (ugen(n, ring) for n in ("e", "f", "k", "kinv"))
    pref = ring.one / (ring.q_pow(-1) - ring.q_pow(1)) ** 2
    inner = kinv.scale(ring.v_pow(1)) - k.scale(ring.v_pow(-1))
    return e * f + (inner * inner).scale(pref)


def casimir_alt(ring=EXACT) -> UElement:
    """The second presentation fe + (q^-1 - q)^-2 (q^(-1/2) k^-1 - q^(1/2) k)^2."""
    e, f, k, kinv = (ugen(n, ring) for n in ("e", "f", "k", "kinv"))
    pref = ring.one / (ring.q_pow(-1) - ring.q_pow(1)) ** 2
    inner = kinv.scale(ring.v_pow(-1)) - k.scale(ring.v_pow(1))
    return f * e + (inner * inner).scale(pref)
