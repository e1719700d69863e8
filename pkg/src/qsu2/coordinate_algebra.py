"""The coordinate *-algebra O(SU_q(2)) as a PBW normal-form engine.

Generators a, b, c, d with

    ab = q ba,  ac = q ca,  bd = q db,  cd = q dc,  bc = cb,
    ad - q bc = 1,  da - q^-1 bc = 1,

and involution a* = d, b* = -q c.  Every element is kept as a linear
combination of normal monomials a^i b^j c^k or d^i b^j c^k, encoded by
:class:`MonomialA` with a signed ``diag`` exponent (positive for a, negative
for d).
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .scalars import EXACT, ExactScalar, HalfInteger

__all__ = [
    "MonomialA",
    "AlgebraElement",
    "gen",
    "generators",
    "monomials_up_to",
    "DiagonalAutomorphism",
    "GeneratorAutomorphism",
    "haar_state",
    "inner_product",
    "counit",
    "multiply",
    "star",
    "grading",
    "haar_monomial",
    "transpose_automorphism",
]


class MonomialA(NamedTuple):
    """a^diag b^b c^c (diag >= 0) or d^-diag b^b c^c (diag < 0)."""

    diag: int
    b: int
    c: int

    @property
    def degree(self) -> int:
        return abs(self.diag) + self.b + self.c

    @property
    def grading(self) -> tuple[int, int]:
        """Twice the (m, n) bidegree.

        m(a) = m(b) = -1/2, m(c) = m(d) = +1/2;
        n(a) = n(c) = -1/2, n(b) = n(d) = +1/2.
        """
        i, j, k = self.diag, self.b, self.c
        if i >= 0:
            return (-i - j + k, -i + j - k)
        i = -i
        return (i - j + k, i + j - k)

    def __str__(self):
        parts = []
        if self.diag > 0:
            parts.append("a" if self.diag == 1 else f"a^{self.diag}")
        elif self.diag < 0:
            parts.append("d" if self.diag == -1 else f"d^{-self.diag}")
        for name, e in (("b", self.b), ("c", self.c)):
            if e:
                parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts) or "1"


ONE_MONO = MonomialA(0, 0, 0)


def monomials_of_degree(d: int) -> list[MonomialA]:
    out = []
    for i in range(-d, d + 1):
        rest = d - abs(i)
        for j in range(rest + 1):
            out.append(MonomialA(i, j, rest - j))
    return out


def monomials_up_to(degree: int) -> list[MonomialA]:
    """All normal monomials of total degree <= ``degree``, graded-lex ordered."""
    out = []
    for d in range(degree + 1):
        out.extend(monomials_of_degree(d))
    return out


class AlgebraElement:
    """Finite linear combination of normal monomials over a coefficient ring."""

    __slots__ = ("terms", "ring", "_hash")

    def __init__(self, terms=None, ring=EXACT):
        self.ring = ring
        clean = {}
        if terms:
            zero = ring.zero
            for mono, coeff in terms.items():
                coeff = ring(coeff)
                if coeff != zero:
                    clean[MonomialA(*mono)] = coeff
        self.terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms, ring):
        obj = object.__new__(cls)
        obj.terms = terms
        obj.ring = ring
        obj._hash = None
        return obj

    @classmethod
    def scalar(cls, value, ring=EXACT) -> AlgebraElement:
        return cls({ONE_MONO: value}, ring)

    @classmethod
    def monomial(cls, mono, coeff=1, ring=EXACT) -> AlgebraElement:
        return cls({MonomialA(*mono): coeff}, ring)

    # -- structure ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=-1)

    def gradings(self) -> set[tuple[int, int]]:
        return {m.grading for m in self.terms}

    def coefficient(self, mono) -> object:
        return self.terms.get(MonomialA(*mono), self.ring.zero)

    # -- linear structure --------------------------------------------------
    def _other(self, other):
        if isinstance(other, AlgebraElement):
            if other.ring is not self.ring:
                raise TypeError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")
            return other
        return AlgebraElement.scalar(other, self.ring)

    def __add__(self, other):
        other = self._other(other)
        terms = dict(self.terms)
        zero = self.ring.zero
        for m, c in other.terms.items():
            s = terms.get(m)
            s = c if s is None else s + c
            if s == zero:
                terms.pop(m, None)
            else:
                terms[m] = s
        return AlgebraElement._wrap(terms, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement._wrap({m: -c for m, c in self.terms.items()}, self.ring)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) + (-self)

    def scale(self, s) -> AlgebraElement:
        s = self.ring(s)
        if s == self.ring.zero:
            return AlgebraElement._wrap({}, self.ring)
        return AlgebraElement._wrap({m: c * s for m, c in self.terms.items()}, self.ring)

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        other = self._other(other)
        return multiply(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = AlgebraElement.scalar(1, self.ring)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.ring is other.ring and self.terms == other.terms
        try:
            return self.terms == AlgebraElement.scalar(other, self.ring).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_sort_key):
            c = self.terms[m]
            parts.append(f"({c})*{m}" if m != ONE_MONO else f"({c})")
        return " + ".join(parts)

    def map_coefficients(self, fn, ring) -> AlgebraElement:
        return AlgebraElement({m: fn(c) for m, c in self.terms.items()}, ring)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> list:
        """Canonical term list: sorted by (degree, diag, b, c)."""
        out = []
        for m in sorted(self.terms, key=_sort_key):
            c = self.terms[m]
            if isinstance(c, ExactScalar):
                coeff = c.to_json()
            else:
                coeff = {"num": [Fraction(c).numerator], "den": [Fraction(c).denominator]}
            out.append({"monomial": list(m), "coeff": coeff})
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data) -> AlgebraElement:
        terms = {}
        for entry in data:
            terms[MonomialA(*entry["monomial"])] = ExactScalar.from_json(entry["coeff"])
        return cls(terms, EXACT)


def _sort_key(m: MonomialA):
    return (m.degree, m.diag, m.b, m.c)


def gen(name: str, ring=EXACT) -> AlgebraElement:
    mono = {"a": (1, 0, 0), "d": (-1, 0, 0), "b": (0, 1, 0), "c": (0, 0, 1), "1": (0, 0, 0)}[name]
    return AlgebraElement.monomial(mono, 1, ring)


def generators(ring=EXACT) -> dict[str, AlgebraElement]:
    return {g: gen(g, ring) for g in "abcd"}


# ---------------------------------------------------------------------------
# multiplication
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _diag_product(i1: int, i2: int) -> tuple:
    """Normal form of D1*D2 as ((i, r, e), ...) meaning q^e * D_i (bc)^r.

    Only exponents of q are recorded; coefficient is an integer multiplicity
    stored alongside: entries are (i, r, [(mult, qexp), ...]).
    """
    # a^m d^n = a^(m-1) d^(n-1) (1 + q^(2n-1) bc)
    # d^m a^n = d^(m-1) a^(n-1) (1 + q^(1-2n) bc)
    if i1 == 0 or i2 == 0 or (i1 > 0) == (i2 > 0):
        return ((i1 + i2, 0, ((1, 0),)),)
    if i1 > 0:
        m, n = i1, -i2
        sign = 1
    else:
        m, n = -i1, i2
        sign = -1
    k = min(m, n)
    # poly in bc: product over t = 0..k-1 of (1 + q^(e_t) bc)
    poly = {0: {0: 1}}  # r -> {qexp: mult}
    for t in range(k):
        nn = n - t
        e = (2 * nn - 1) if sign == 1 else (1 - 2 * nn)
        new = {}
        for r, coeffs in poly.items():
            for qe, mult in coeffs.items():
                new.setdefault(r, {}).setdefault(qe, 0)
                new[r][qe] += mult
                new.setdefault(r + 1, {}).setdefault(qe + e, 0)
                new[r + 1][qe + e] += mult
        poly = new
    rem = (m - k) * (1 if i1 > 0 else -1) + (n - k) * (1 if i2 > 0 else -1)
    return tuple(
        (rem, r, tuple(sorted((mult, qe) for qe, mult in coeffs.items() if mult)))
        for r, coeffs in sorted(poly.items())
    )


_product_cache: dict = {}


def monomial_product(m1: MonomialA, m2: MonomialA, ring=EXACT) -> dict:
    """Normal form of m1*m2 as a term dict (cached per ring)."""
    key = (id(ring), m1, m2)
    hit = _product_cache.get(key)
    if hit is not None:
        return hit
    i1, j1, k1 = m1
    i2, j2, k2 = m2
    # move D2 left through b^j1 c^k1:  b^j c^k a^i = q^(-i(j+k)) a^i b^j c^k,
    #                                  b^j c^k d^i = q^(+i(j+k)) d^i b^j c^k
    shift = -i2 * (j1 + k1)
    terms = {}
    for i, r, coeffs in _diag_product(i1, i2):
        c = ring.zero
        for mult, qe in coeffs:
            c = c + ring.q_pow(qe + shift) * mult
        mono = MonomialA(i, r + j1 + j2, r + k1 + k2)
        terms[mono] = terms.get(mono, ring.zero) + c
    terms = {m: c for m, c in terms.items() if c != ring.zero}
    _product_cache[key] = terms
    return terms


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    ring = x.ring
    if y.ring is not ring:
        raise TypeError("ring mismatch")
    out: dict = {}
    zero = ring.zero
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            c12 = c1 * c2
            for m, c in monomial_product(m1, m2, ring).items():
                s = out.get(m)
                out[m] = c12 * c if s is None else s + c12 * c
    return AlgebraElement._wrap({m: c for m, c in out.items() if c != zero}, ring)


# ---------------------------------------------------------------------------
# involution and gradings
# ---------------------------------------------------------------------------

_star_cache: dict = {}


def _star_monomial(m: MonomialA, ring) -> AlgebraElement:
    key = (id(ring), m)
    hit = _star_cache.get(key)
    if hit is not None:
        return hit
    # (D b^j c^k)* = (c*)^k (b*)^j D*,  c* = -q^-1 b,  b* = -q c,  a* = d
    i, j, k = m
    out = AlgebraElement.scalar((-1) ** (j + k), ring).scale(ring.q_pow(j - k))
    out = out * AlgebraElement.monomial((0, k, j), 1, ring)
    out = out * AlgebraElement.monomial((-i, 0, 0), 1, ring)
    _star_cache[key] = out
    return out


def star(x: AlgebraElement) -> AlgebraElement:
    """Antilinear anti-automorphism with a* = d, b* = -q c.

    Coefficients are real rational functions of q, so conjugation is the
    identity on them in the exact layer.
    """
    out = AlgebraElement._wrap({}, x.ring)
    for m, c in x.terms.items():
        out = out + _star_monomial(m, x.ring).scale(c)
    return out


def grading(x: AlgebraElement) -> list[tuple[HalfInteger, HalfInteger, AlgebraElement]]:
    """Split x into (m, n)-homogeneous components."""
    buckets: dict = {}
    for mono, c in x.terms.items():
        buckets.setdefault(mono.grading, {})[mono] = c
    out = []
    for (m2, n2) in sorted(buckets):
        out.append((HalfInteger(m2), HalfInteger(n2), AlgebraElement._wrap(buckets[(m2, n2)], x.ring)))
    return out


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------


class DiagonalAutomorphism:
    """x_(m,n) -> lam_h^(2m) mu_h^(2n) x_(m,n) on homogeneous components.

    With lambda = lam_h^2, mu = mu_h^2 this is xi^l_mn -> lambda^m mu^n xi^l_mn.
    """

    def __init__(self, lam_h=1, mu_h=1, ring=EXACT):
        self.ring = ring
        self.lam_h = ring(lam_h)
        self.mu_h = ring(mu_h)
        if self.lam_h == ring.zero or self.mu_h == ring.zero:
            raise ValueError("diagonal automorphism parameters must be nonzero")
        self._cache: dict = {}

    def factor(self, m2: int, n2: int):
        key = (m2, n2)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.lam_h**m2 * self.mu_h**n2
            self._cache[key] = hit
        return hit

    def __call__(self, x: AlgebraElement) -> AlgebraElement:
        terms = {m: c * self.factor(*m.grading) for m, c in x.terms.items()}
        return AlgebraElement._wrap(terms, x.ring)

    def compose(self, other: DiagonalAutomorphism) -> DiagonalAutomorphism:
        if not isinstance(other, DiagonalAutomorphism):
            return NotImplemented
        return DiagonalAutomorphism(self.lam_h * other.lam_h, self.mu_h * other.mu_h, self.ring)

    __matmul__ = compose

    def inverse(self) -> DiagonalAutomorphism:
        one = self.ring.one
        return DiagonalAutomorphism(one / self.lam_h, one / self.mu_h, self.ring)

    def power(self, p: int) -> DiagonalAutomorphism:
        return DiagonalAutomorphism(self.lam_h**p, self.mu_h**p, self.ring)

    def __eq__(self, other):
        if not isinstance(other, DiagonalAutomorphism):
            return NotImplemented
        return self.lam_h == other.lam_h and self.mu_h == other.mu_h

    def __hash__(self):
        return hash((self.lam_h, self.mu_h))

    def __repr__(self):
        return f"DiagonalAutomorphism(lam_h={self.lam_h}, mu_h={self.mu_h})"


class GeneratorAutomorphism:
    """Algebra endomorphism fixed by the images of a, b, c, d.

    No check that the images respect the relations is made here; the
    hochschild preconditions test what they need.
    """

    def __init__(self, images: dict, ring=EXACT):
        self.ring = ring
        self.images = {g: images[g] for g in "abcd"}
        self._cache: dict = {}

    def _on_monomial(self, m: MonomialA) -> AlgebraElement:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        i, j, k = m
        g = self.images["a"] if i >= 0 else self.images["d"]
        out = g ** abs(i) * self.images["b"] ** j * self.images["c"] ** k
        self._cache[m] = out
        return out

    def __call__(self, x: AlgebraElement) -> AlgebraElement:
        out = AlgebraElement._wrap({}, x.ring)
        for m, c in x.terms.items():
            out = out + self._on_monomial(m).scale(c)
        return out


def transpose_automorphism(ring=EXACT) -> GeneratorAutomorphism:
    """b <-> c with a, d fixed; an automorphism not commuting with sigma_L."""
    g = generators(ring)
    return GeneratorAutomorphism({"a": g["a"], "b": g["c"], "c": g["b"], "d": g["d"]}, ring)


# ---------------------------------------------------------------------------
# Haar state
# ---------------------------------------------------------------------------

_haar_cache: dict = {}


def haar_monomial(m: MonomialA, ring=EXACT):
    """h(a^i b^j c^k) = h(d^i b^j c^k) = 0 unless i = 0 and j = k, and
    h((bc)^j) = (-q)^j (1 - q^2)/(1 - q^(2j+2))."""
    if m.diag != 0 or m.b != m.c:
        return ring.zero
    key = (id(ring), m.b)
    hit = _haar_cache.get(key)
    if hit is None:
        j = m.b
        one = ring.one
        hit = ring.q_pow(j) * (-1) ** j * (one - ring.q_pow(2)) / (one - ring.q_pow(2 * j + 2))
        _haar_cache[key] = hit
    return hit


def haar_state(x: AlgebraElement):
    ring = x.ring
    total = ring.zero
    for m, c in x.terms.items():
        if m.diag == 0 and m.b == m.c:
            total = total + c * haar_monomial(m, ring)
    return total


def inner_product(x: AlgebraElement, y: AlgebraElement):
    """<x, y> = h(x* y)."""
    return haar_state(star(x) * y)


def counit(x: AlgebraElement):
    """The character a, d -> 1, b, c -> 0 (a trace that is not sigma_L-invariant)."""
    total = x.ring.zero
    for m, c in x.terms.items():
        if m.b == 0 and m.c == 0:
            total = total + c
    return total
