"""Scalar layers: exact rational functions in v = q**(1/2), exact
specializations at a rational q, a complex numeric layer, and q-combinatorics.

The exact layer is :class:`ExactScalar`, an element of Q(v) kept in canonical
form (coprime integer polynomials, denominator with positive leading
coefficient).  Polynomial arithmetic is delegated to python-flint.

The algebra engines never touch a scalar type directly; they go through a
*ring* object (:data:`EXACT` or :func:`specialize`) that knows how to build
``q**k`` and ``v**k`` and how to coerce rationals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from numbers import Rational

import flint
import mpmath

__all__ = [
    "ExactScalar",
    "HalfInteger",
    "PoleError",
    "DivergenceError",
    "EXACT",
    "ExactField",
    "RationalSpecialization",
    "specialize",
    "v",
    "q",
    "eval_numeric",
    "q_integer",
    "generalized_q_integer",
    "geometric_moment_sums",
    "complex_binomial",
    "one_minus_q_pow",
    "parse_rational",
]

_Poly = flint.fmpz_poly
_ZERO = _Poly([])
_ONE = _Poly([1])

#: |w -+ 1| below this switches [k]_w to its polynomial form.
Q_INTEGER_FALLBACK = 1e-6


class PoleError(ArithmeticError):
    """Raised when a value is requested at a pole."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class DivergenceError(ArithmeticError):
    pass


def parse_rational(text) -> Fraction:
    """Parse ``"p/r"`` (or an int / Fraction) into a Fraction.

    Floats are refused: exact suites are meant to run at exact q.
    """
    if isinstance(text, float):
        raise TypeError("floats are not accepted where an exact rational is required")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"expected a rational 'p/r', got {s!r}")
    return Fraction(s)


def _check_q0(q0) -> Fraction:
    q0 = Fraction(q0)
    if not 0 < q0 < 1:
        raise ValueError(f"q0 must lie strictly inside (0, 1), got {q0}")
    return q0


# ---------------------------------------------------------------------------
# Exact layer
# ---------------------------------------------------------------------------


class ExactScalar:
    """Element of Q(v), v = q**(1/2), in canonical form.

    >>> v * v == q
    True
    >>> 1 / (q - 1 / q)
    v^2/(v^4 - 1)
    """

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, numerator=0, denominator=1):
        num = numerator if isinstance(numerator, _Poly) else _Poly(_coeff_list(numerator))
        den = denominator if isinstance(denominator, _Poly) else _Poly(_coeff_list(denominator))
        if den == _ZERO:
            raise ZeroDivisionError("zero denominator")
        self._num, self._den = _canonical(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num, den):
        # caller guarantees canonical form
        obj = object.__new__(cls)
        obj._num = num
        obj._den = den
        obj._hash = None
        return obj

    @classmethod
    def from_rational(cls, value) -> ExactScalar:
        value = Fraction(value)
        return cls._raw(_Poly([value.numerator]), _Poly([value.denominator]))

    @classmethod
    def monomial(cls, power: int, coeff: int = 1) -> ExactScalar:
        """``coeff * v**power`` for any integer power."""
        return _monomial(power, coeff)

    # -- accessors ---------------------------------------------------------
    @property
    def numerator(self) -> list[int]:
        return [int(c) for c in self._num.coeffs()]

    @property
    def denominator(self) -> list[int]:
        return [int(c) for c in self._den.coeffs()]

    def is_zero(self) -> bool:
        return self._num == _ZERO

    def is_monomial(self) -> bool:
        """True when the value is ``c * v**k`` for a rational c != 0."""
        return _single_term(self._num) and _single_term(self._den)

    def monomial_data(self) -> tuple[Fraction, int]:
        """Return ``(c, k)`` with ``self == c * v**k``; requires :meth:`is_monomial`."""
        if not self.is_monomial():
            raise ValueError(f"{self} is not a monomial in v")
        nc, nk = _term(self._num)
        dc, dk = _term(self._den)
        return Fraction(nc, dc), nk - dk

    def is_even(self) -> bool:
        """True when the value lies in Q(q), i.e. only even powers of v occur."""
        return _is_even(self._num) and _is_even(self._den)

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ExactScalar):
            return other
        if isinstance(other, (int, Rational)):
            return ExactScalar.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._num == _ZERO:
            return self
        if self._num == _ZERO:
            return other
        d1, d2 = self._den, other._den
        if d1 == d2:
            n = self._num + other._num
            if d1 == _ONE:
                return ExactScalar._raw(n, _ONE)
            return ExactScalar._raw(*_canonical(n, d1))
        if d1 == _ONE:
            return ExactScalar._raw(*_canonical(self._num * d2 + other._num, d2))
        if d2 == _ONE:
            return ExactScalar._raw(*_canonical(self._num + other._num * d1, d1))
        return ExactScalar._raw(*_canonical(self._num * d2 + other._num * d1, d1 * d2))

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar._raw(-self._num, self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._num == _ZERO or other._num == _ZERO:
            return _EXACT_ZERO
        if self._den == _ONE and other._den == _ONE:
            return ExactScalar._raw(self._num * other._num, _ONE)
        return ExactScalar._raw(*_canonical(self._num * other._num, self._den * other._den))

    __rmul__ = __mul__

    def inverse(self) -> ExactScalar:
        if self._num == _ZERO:
            raise ZeroDivisionError("inverse of zero")
        return ExactScalar._raw(*_canonical(self._den, self._num))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return ExactScalar._raw(self._num**k, self._den**k)

    # -- comparison / hashing ----------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self.numerator), tuple(self.denominator)))
        return self._hash

    def __bool__(self):
        return self._num != _ZERO

    # -- evaluation --------------------------------------------------------
    def split_at(self, q0) -> tuple[Fraction, Fraction]:
        """Exact ``(x, y)`` with ``self(v0) == x + y*sqrt(q0)``, v0 = sqrt(q0).

        Raises :class:`PoleError` if the denominator vanishes at v0.
        """
        q0 = Fraction(q0)
        a, b = _even_odd_at(self._num, q0)
        c, d = _even_odd_at(self._den, q0)
        norm = c * c - d * d * q0
        if norm == 0:
            # q0 is a rational square: sqrt(q0) = s and c + d*s may vanish
            s = _rational_sqrt(q0)
            if s is not None and c + d * s == 0:
                raise PoleError(f"{self} has a pole at q = {q0}", location=q0)
            if s is None:
                raise PoleError(f"{self} has a pole at q = {q0}", location=q0)
            val = (a + b * s) / (c + d * s)
            return val, Fraction(0)
        x = (a * c - b * d * q0) / norm
        y = (b * c - a * d) / norm
        return x, y

    def at_q(self, q0) -> Fraction:
        """Exact value at a rational q0 when it is rational there."""
        x, y = self.split_at(q0)
        if y != 0:
            s = _rational_sqrt(Fraction(q0))
            if s is None:
                raise ValueError(f"{self} is irrational at q = {q0}")
            return x + y * s
        return x

    def __float__(self):
        raise TypeError("ExactScalar has no float value without a q; use eval_numeric")

    # -- display -----------------------------------------------------------
    def __repr__(self):
        n = _poly_str(self._num)
        if self._den == _ONE:
            return n
        d = _poly_str(self._den)
        if not _single_term(self._num) and self._num != _ZERO:
            n = f"({n})"
        if not _single_term(self._den) or int(self._den.coeffs()[-1]) != 1:
            d = f"({d})"
        return f"{n}/{d}"

    def to_json(self) -> dict:
        return {"num": self.numerator, "den": self.denominator}

    @classmethod
    def from_json(cls, data: dict) -> ExactScalar:
        return cls(_Poly(data["num"]), _Poly(data["den"]))


def _coeff_list(value):
    if isinstance(value, int):
        return [value]
    if isinstance(value, (list, tuple)):
        return list(value)
    raise TypeError(f"cannot build a polynomial from {value!r}")


def _canonical(num, den):
    if num == _ZERO:
        return _ZERO, _ONE
    if den == _ONE:
        return num, _ONE
    g = num.gcd(den)
    if g != _ONE:
        num = num // g
        den = den // g
    if den.coeffs()[-1] < 0:
        num, den = -num, -den
    return num, den


def _single_term(p) -> bool:
    coeffs = p.coeffs()
    return sum(1 for c in coeffs if c != 0) == 1


def _term(p):
    coeffs = p.coeffs()
    for k, c in enumerate(coeffs):
        if c != 0:
            return int(c), k
    raise ValueError("zero polynomial")


def _is_even(p) -> bool:
    return all(c == 0 for c in p.coeffs()[1::2])


def _even_odd_at(p, q0: Fraction):
    even = Fraction(0)
    odd = Fraction(0)
    coeffs = p.coeffs()
    # Horner in q separately on even and odd parts
    for c in reversed(coeffs[0::2]):
        even = even * q0 + int(c)
    for c in reversed(coeffs[1::2]):
        odd = odd * q0 + int(c)
    return even, odd


def _rational_sqrt(x: Fraction):
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _poly_str(p) -> str:
    coeffs = [int(c) for c in p.coeffs()]
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        elif k == 1:
            body = "v" if mag == 1 else f"{mag}*v"
        else:
            body = f"v^{k}" if mag == 1 else f"{mag}*v^{k}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


@lru_cache(maxsize=4096)
def _monomial(power: int, coeff: int = 1) -> ExactScalar:
    if coeff == 0:
        return _EXACT_ZERO
    if power >= 0:
        return ExactScalar._raw(_Poly([0] * power + [coeff]), _ONE)
    return ExactScalar._raw(_Poly([coeff]), _Poly([0] * (-power) + [1]))


_EXACT_ZERO = ExactScalar._raw(_ZERO, _ONE)
v = ExactScalar.monomial(1)
q = ExactScalar.monomial(2)


# ---------------------------------------------------------------------------
# Rings used by the algebra engines
# ---------------------------------------------------------------------------


class ExactField:
    """Q(v) as a coefficient ring."""

    exact = True
    name = "Q(v)"

    def __init__(self):
        self.zero = _EXACT_ZERO
        self.one = ExactScalar.monomial(0)

    def __repr__(self):
        return "EXACT"

    def __call__(self, value):
        if isinstance(value, ExactScalar):
            return value
        return ExactScalar.from_rational(value)

    def q_pow(self, k: int) -> ExactScalar:
        return _monomial(2 * k)

    def v_pow(self, k: int) -> ExactScalar:
        """q**(k/2)."""
        return _monomial(k)

    def to_numeric(self, x: ExactScalar, q0) -> float:
        return eval_numeric(x, q0)


class RationalSpecialization:
    """Q with q fixed to a rational q0; v**k is available only when rational."""

    exact = True

    def __init__(self, q0):
        self.q0 = _check_q0(q0)
        self.sqrt_q0 = _rational_sqrt(self.q0)
        self.zero = Fraction(0)
        self.one = Fraction(1)
        self.name = f"Q[q={self.q0}]"

    def __repr__(self):
        return f"specialize({self.q0})"

    def __call__(self, value):
        if isinstance(value, ExactScalar):
            return value.at_q(self.q0)
        return Fraction(value)

    def q_pow(self, k: int) -> Fraction:
        return self.q0**k

    def v_pow(self, k: int) -> Fraction:
        if k % 2 == 0:
            return self.q0 ** (k // 2)
        if self.sqrt_q0 is None:
            raise ValueError(f"q**({k}/2) is irrational at q = {self.q0}")
        return self.sqrt_q0**k

    def to_numeric(self, x: Fraction, q0=None) -> float:
        return float(x)


EXACT = ExactField()


@lru_cache(maxsize=None)
def specialize(q0) -> RationalSpecialization:
    return RationalSpecialization(Fraction(q0))


# ---------------------------------------------------------------------------
# Numeric layer
# ---------------------------------------------------------------------------


def eval_numeric(x, q0) -> float:
    """Evaluate an exact scalar at ``q = q0`` (a rational in (0,1)).

    The value is computed as an exact ``X + Y*sqrt(q0)`` and only rounded at
    the end, so the result is correctly rounded up to the final sqrt.
    """
    q0 = _check_q0(q0)
    if isinstance(x, (int, Fraction)):
        return float(x)
    X, Y = x.split_at(q0)
    if Y == 0:
        return float(X)
    with mpmath.workdps(40):
        val = mpmath.mpf(X.numerator) / X.denominator + (
            mpmath.mpf(Y.numerator) / Y.denominator
        ) * mpmath.sqrt(mpmath.mpf(q0.numerator) / q0.denominator)
        return float(val)


@total_ordering
@dataclass(frozen=True)
class HalfInteger:
    """A number in (1/2)Z, stored as twice its value."""

    twice: int

    @classmethod
    def of(cls, value) -> HalfInteger:
        if isinstance(value, HalfInteger):
            return value
        f = Fraction(value) if not isinstance(value, str) else Fraction(value)
        t = 2 * f
        if t.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(t))

    def __add__(self, other):
        other = HalfInteger.of(other)
        return HalfInteger(self.twice + other.twice)

    __radd__ = __add__

    def __sub__(self, other):
        other = HalfInteger.of(other)
        return HalfInteger(self.twice - other.twice)

    def __rsub__(self, other):
        return HalfInteger.of(other) - self

    def __neg__(self):
        return HalfInteger(-self.twice)

    def __lt__(self, other):
        return self.twice < HalfInteger.of(other).twice

    def __eq__(self, other):
        try:
            return self.twice == HalfInteger.of(other).twice
        except (ValueError, TypeError):
            return NotImplemented

    def __hash__(self):
        return hash(("half", self.twice))

    def __float__(self):
        return self.twice / 2

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __repr__(self):
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"

    __str__ = __repr__


# ---------------------------------------------------------------------------
# q-combinatorics
# ---------------------------------------------------------------------------


def q_integer(z, q0=None):
    """The q-integer [z]_q = (q^z - q^-z) / (q - q^-1).

    With a half-integer ``z`` and no ``q0`` the result is exact in Q(v).
    With ``q0`` given, ``z`` may be any complex number and a complex value is
    returned (real inputs give real-valued complex numbers).
    """
    if q0 is None:
        t = HalfInteger.of(z).twice
        return (_monomial(t) - _monomial(-t)) / (_monomial(2) - _monomial(-2))
    q0 = float(q0)
    if not 0 < q0 < 1:
        raise ValueError("q0 must lie in (0, 1)")
    lq = math.log(q0)
    z = complex(z) if not isinstance(z, HalfInteger) else complex(float(z))
    return (cmath.exp(z * lq) - cmath.exp(-z * lq)) / (q0 - 1 / q0)


def generalized_q_integer(k: int, w) -> complex:
    """[k]_w = (w^-k - w^k)/(w^-1 - w), continuously extended.

    [k]_0 = k by definition; near w = +-1 the polynomial form
    w^-(k-1) + w^-(k-3) + ... + w^(k-1) is used.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    w = complex(w)
    if k == 0:
        return 0j
    if w == 0:
        return complex(k)
    if abs(w - 1) < Q_INTEGER_FALLBACK or abs(w + 1) < Q_INTEGER_FALLBACK:
        return sum(w ** (k - 1 - 2 * i) for i in range(k))
    return (w**-k - w**k) / (1 / w - w)


def geometric_moment_sums(w, order: int, q0) -> complex:
    """Closed forms of sum_k k q^(wk) (order 1) and sum_k k^2 q^(wk) (order 2)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    x = cmath.exp(complex(w) * math.log(float(q0)))
    if abs(x) >= 1:
        raise DivergenceError(f"|q^w| = {abs(x):.6g} >= 1: the series diverges")
    if order == 1:
        return x / (1 - x) ** 2
    return x * (1 + x) / (1 - x) ** 3


def complex_binomial(z, j: int) -> complex:
    """(z + j - 1 choose j) by the recursion C_j = C_{j-1} (z+j-1)/j."""
    z = complex(z)
    c = 1 + 0j
    for i in range(1, j + 1):
        c = c * (z + i - 1) / i
    return c


def one_minus_q_pow(w, log_q: float) -> complex:
    """1 - q**w for complex w, accurate when q**w is close to 1."""
    s = complex(w) * log_q
    x, y = s.real, s.imag
    # exp(s) - 1 = expm1(x) cos y - 2 sin^2(y/2) + i e^x sin y
    re = math.expm1(x) * math.cos(y) - 2.0 * math.sin(y / 2.0) ** 2
    im = math.exp(x) * math.sin(y)
    return -complex(re, im)
