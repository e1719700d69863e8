"""Finite truncations of the Haar GNS space.

Each (m, n)-graded component of A holds exactly one normal monomial per
degree D, D = D0, D0 + 2, ...  Gram-Schmidt in that order therefore produces
the matrix elements t^l_{mn} with l = D/2, one per degree.  We keep the
orthogonal (unnormalized) vectors so that everything stays inside the
coefficient ring; orthonormal matrices are only formed numerically.

Writing x_D for the monomials of a component and t_D for the orthogonal
vectors, x_D = sum_{D' <= D} L[D][D'] t_{D'} with L unit lower triangular,
which is the LDL^T factorization of the component's Gram matrix.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coordinate_algebra import AlgebraElement, MonomialA, haar_monomial, multiply, star
from .enveloping_algebra import casimir
from .left_action import LeftActionEngine, default_engine
from .reports import CheckReport
from .scalars import EXACT, HalfInteger, _check_q0, specialize

__all__ = [
    "SingularGramError",
    "GaugeCalibrationError",
    "BasisVector",
    "TruncationSpace",
    "TruncatedOperator",
    "build_truncation",
    "expand_in_basis",
    "operator_matrix",
    "multiplication_matrix",
    "efk_matrices",
    "modular_operator",
    "gauge_mismatch",
    "calibrate_gauge",
    "gram_leading_minors",
    "growth_constants",
    "verify_labels",
    "verify_ef_fe",
    "verify_modular_identity",
    "adjointness_error",
    "truncation_dimension",
]


class SingularGramError(ArithmeticError):
    """A Gram pivot vanished; the Haar state would not be faithful."""


class GaugeCalibrationError(ValueError):
    pass


def truncation_dimension(N: int) -> int:
    return sum((t + 1) ** 2 for t in range(N + 1))


def _component_monomial(m2: int, n2: int, D: int) -> MonomialA | None:
    """The unique normal monomial of degree D and twice-grading (m2, n2)."""
    s = -(m2 + n2)
    if s % 2 or (n2 - m2) % 2:
        return None
    i = s // 2  # a^i for i >= 0, d^-i otherwise
    diff = (n2 - m2) // 2  # j - k
    rest = D - abs(i)
    if rest < 0 or (rest + diff) % 2:
        return None
    j = (rest + diff) // 2
    k = rest - j
    if j < 0 or k < 0:
        return None
    return MonomialA(i, j, k)


class _Component:
    """Incremental LDL^T of one graded component's Gram matrix."""

    def __init__(self, m2: int, n2: int, ring):
        self.m2, self.n2, self.ring = m2, n2, ring
        self.d0 = max(abs(m2), abs(n2))
        self.monos: list[MonomialA] = []
        self.L: list[list] = []
        self.pivots: list = []
        self.vectors: list[AlgebraElement] = []
        self._stars: list[AlgebraElement] = []

    def _gram(self, i: int, j: int):
        prod = multiply(self._stars[i], AlgebraElement.monomial(self.monos[j], 1, self.ring))
        total = self.ring.zero
        for m, c in prod.terms.items():
            if m.diag == 0 and m.b == m.c:
                total = total + c * haar_monomial(m, self.ring)
        return total

    def ensure(self, max_degree: int) -> None:
        ring = self.ring
        while self.d0 + 2 * len(self.monos) <= max_degree:
            D = self.d0 + 2 * len(self.monos)
            mono = _component_monomial(self.m2, self.n2, D)
            if mono is None:
                raise AssertionError(f"no monomial of degree {D} in component {(self.m2, self.n2)}")
            self.monos.append(mono)
            self._stars.append(star(AlgebraElement.monomial(mono, 1, ring)))
            i = len(self.monos) - 1
            g = [self._gram(i, j) for j in range(i + 1)]
            row = []
            for j in range(i):
                s = g[j]
                for k in range(j):
                    s = s - row[k] * self.L[j][k] * self.pivots[k]
                row.append(s / self.pivots[j])
            piv = g[i]
            for k in range(i):
                piv = piv - row[k] * row[k] * self.pivots[k]
            if piv == ring.zero:
                raise SingularGramError(f"zero Gram pivot at component {(self.m2, self.n2)}, degree {D}")
            row.append(ring.one)
            self.L.append(row)
            self.pivots.append(piv)
            vec = AlgebraElement.monomial(mono, 1, ring)
            for j in range(i):
                if row[j] != ring.zero:
                    vec = vec - self.vectors[j].scale(row[j])
            self.vectors.append(vec)


class _ComponentStore:
    def __init__(self, ring):
        self.ring = ring
        self.components: dict = {}

    def get(self, m2: int, n2: int, max_degree: int) -> _Component:
        comp = self.components.get((m2, n2))
        if comp is None:
            comp = self.components[(m2, n2)] = _Component(m2, n2, self.ring)
        comp.ensure(max_degree)
        return comp


_stores: dict = {}


def _store(ring) -> _ComponentStore:
    st = _stores.get(id(ring))
    if st is None:
        st = _stores[id(ring)] = _ComponentStore(ring)
    return st


@dataclass(frozen=True)
class BasisVector:
    """t^l_{mn}: the orthogonal basis vector with labels (l, m, n)."""

    l: HalfInteger
    m: HalfInteger
    n: HalfInteger
    coeffs: AlgebraElement
    norm_sq: object
    index: int

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.l.twice, self.m.twice, self.n.twice)


class TruncationSpace:
    """The span of t^l_{mn} with 2l <= N."""

    def __init__(self, N: int, ring=EXACT):
        if N < 0:
            raise ValueError("N must be nonnegative")
        self.N = N
        self.ring = ring
        store = _store(ring)
        basis = []
        for l2 in range(N + 1):
            for m2 in range(-l2, l2 + 1, 2):
                for n2 in range(-l2, l2 + 1, 2):
                    comp = store.get(m2, n2, l2)
                    pos = (l2 - comp.d0) // 2
                    basis.append(
                        BasisVector(
                            HalfInteger(l2), HalfInteger(m2), HalfInteger(n2),
                            comp.vectors[pos], comp.pivots[pos], len(basis),
                        )
                    )
        self.basis = basis
        self.index = {b.key: b.index for b in basis}
        if len(basis) != truncation_dimension(N):
            raise AssertionError("dimension formula violated")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def labels(self) -> list[tuple[int, int, int]]:
        return [b.key for b in self.basis]

    def gram_blocks(self) -> dict:
        """Monomial Gram data per component: (monomials, L, pivots)."""
        store = _store(self.ring)
        out = {}
        for (m2, n2), comp in sorted(store.components.items()):
            if comp.d0 > self.N:
                continue
            k = (self.N - comp.d0) // 2 + 1
            out[(m2, n2)] = (comp.monos[:k], [r[:] for r in comp.L[:k]], comp.pivots[:k])
        return out

    def norms_numeric(self, q0) -> np.ndarray:
        return np.array([_to_float(b.norm_sq, self.ring, q0) for b in self.basis])

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "dim": self.dim,
            "basis": [
                {"l": str(b.l), "m": str(b.m), "n": str(b.n), "vector": b.coeffs.to_json(),
                 "norm_sq": b.norm_sq.to_json() if hasattr(b.norm_sq, "to_json") else str(b.norm_sq)}
                for b in self.basis
            ],
        }

    def labels_csv(self, q0=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "l", "m", "n", "norm_sq"] if q0 is None else ["index", "l", "m", "n", "norm_sq", "norm_sq_numeric"])
        for b in self.basis:
            row = [b.index, str(b.l), str(b.m), str(b.n), str(b.norm_sq)]
            if q0 is not None:
                row.append(repr(_to_float(b.norm_sq, self.ring, q0)))
            w.writerow(row)
        return buf.getvalue()


_spaces: dict = {}


def build_truncation(N: int, ring=EXACT) -> TruncationSpace:
    key = (id(ring), N)
    sp = _spaces.get(key)
    if sp is None:
        sp = _spaces[key] = TruncationSpace(N, ring)
    return sp


def _to_float(x, ring, q0) -> float:
    if isinstance(x, Fraction) or isinstance(x, int):
        return float(x)
    return ring.to_numeric(x, q0)


def expand_in_basis(x: AlgebraElement) -> dict:
    """Coordinates of x in the orthogonal basis, keyed by (2l, 2m, 2n)."""
    ring = x.ring
    store = _store(ring)
    out: dict = {}
    for mono, c in x.terms.items():
        m2, n2 = mono.grading
        comp = store.get(m2, n2, mono.degree)
        pos = (mono.degree - comp.d0) // 2
        for j, lij in enumerate(comp.L[pos]):
            if lij == ring.zero:
                continue
            key = (comp.d0 + 2 * j, m2, n2)
            s = out.get(key)
            out[key] = c * lij if s is None else s + c * lij
    return {k: v for k, v in out.items() if v != ring.zero}


class TruncatedOperator:
    """Sparse matrix on a labeled space, in the orthogonal basis.

    ``space`` is anything exposing ``dim`` (a :class:`TruncationSpace` or a
    doubled space).  Entry (i, j) is the i-th coordinate of T applied to
    basis vector j.
    """

    __slots__ = ("space", "entries", "ring")

    def __init__(self, space, entries: dict, ring):
        self.space = space
        self.ring = ring
        self.entries = {k: v for k, v in entries.items() if v != ring.zero}

    @classmethod
    def diagonal(cls, space, values, ring) -> TruncatedOperator:
        return cls(space, {(i, i): v for i, v in enumerate(values)}, ring)

    @classmethod
    def zero(cls, space, ring) -> TruncatedOperator:
        return cls(space, {}, ring)

    @property
    def dim(self) -> int:
        return self.space.dim

    def __add__(self, other: TruncatedOperator) -> TruncatedOperator:
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k)
            out[k] = v if s is None else s + v
        return TruncatedOperator(self.space, out, self.ring)

    def __neg__(self) -> TruncatedOperator:
        return TruncatedOperator(self.space, {k: -v for k, v in self.entries.items()}, self.ring)

    def __sub__(self, other: TruncatedOperator) -> TruncatedOperator:
        return self + (-other)

    def scale(self, s) -> TruncatedOperator:
        s = self.ring(s)
        return TruncatedOperator(self.space, {k: v * s for k, v in self.entries.items()}, self.ring)

    def __matmul__(self, other: TruncatedOperator) -> TruncatedOperator:
        cols: dict = {}
        for (k, j), v in other.entries.items():
            cols.setdefault(k, []).append((j, v))
        out: dict = {}
        for (i, k), u in self.entries.items():
            for j, v in cols.get(k, ()):
                s = out.get((i, j))
                out[(i, j)] = u * v if s is None else s + u * v
        return TruncatedOperator(self.space, out, self.ring)

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncatedOperator) and self.entries == other.entries

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.entries

    def is_diagonal(self) -> bool:
        return all(i == j for i, j in self.entries)

    def diagonal_entries(self) -> list:
        return [self.entries.get((i, i), self.ring.zero) for i in range(self.dim)]

    def entry(self, i: int, j: int):
        return self.entries.get((i, j), self.ring.zero)

    def restrict(self, rows, cols) -> TruncatedOperator:
        rows, cols = set(rows), set(cols)
        return TruncatedOperator(
            self.space, {k: v for k, v in self.entries.items() if k[0] in rows and k[1] in cols}, self.ring
        )

    def to_numpy(self, q0, orthonormal: bool = True, norms=None) -> np.ndarray:
        """Float matrix at q = q0; in the orthonormal basis when requested,
        i.e. entry (i, j) times sqrt(norm_i / norm_j)."""
        M = np.zeros((self.dim, self.dim))
        for (i, j), v in self.entries.items():
            M[i, j] = _to_float(v, self.ring, q0)
        if orthonormal:
            if norms is None:
                norms = self.space.norms_numeric(q0)
            r = np.sqrt(norms)
            M = M * r[:, None] / r[None, :]
        return M

    def __repr__(self):
        return f"TruncatedOperator(dim={self.dim}, nnz={len(self.entries)})"


def operator_matrix(fn, space: TruncationSpace, strict: bool = False) -> TruncatedOperator:
    """Matrix of a linear map A -> A compressed to the truncation.

    With ``strict`` the map must preserve the truncation; anything leaving
    it raises instead of being dropped.
    """
    entries = {}
    for b in space.basis:
        for key, c in expand_in_basis(fn(b.coeffs)).items():
            i = space.index.get(key)
            if i is None:
                if strict:
                    raise ValueError(f"image of {b.key} leaves the truncation at {key}")
                continue
            entries[(i, b.index)] = c
    return TruncatedOperator(space, entries, space.ring)


def multiplication_matrix(x: AlgebraElement, space: TruncationSpace) -> TruncatedOperator:
    """pi(x) compressed: P pi(x) P."""
    if x.ring is not space.ring:
        raise TypeError("ring mismatch")
    return operator_matrix(lambda y: multiply(x, y), space)


def efk_matrices(space: TruncationSpace, engine: LeftActionEngine | None = None):
    """(E, F, K, K^-1) in the orthogonal basis; each preserves every A_l."""
    engine = engine or default_engine(space.ring)
    E = operator_matrix(engine.e, space, strict=True)
    F = operator_matrix(engine.f, space, strict=True)
    ring = space.ring
    K = TruncatedOperator.diagonal(space, [ring.v_pow(-b.n.twice) for b in space.basis], ring)
    Kinv = TruncatedOperator.diagonal(space, [ring.v_pow(b.n.twice) for b in space.basis], ring)
    return E, F, K, Kinv


def modular_operator(space: TruncationSpace) -> TruncatedOperator:
    """Delta_L = K^2: diagonal q^(-2n)."""
    ring = space.ring
    return TruncatedOperator.diagonal(space, [ring.v_pow(-2 * b.n.twice) for b in space.basis], ring)


def modular_operator_inverse(space: TruncationSpace) -> TruncatedOperator:
    ring = space.ring
    return TruncatedOperator.diagonal(space, [ring.v_pow(2 * b.n.twice) for b in space.basis], ring)


# ---------------------------------------------------------------------------
# Label and gauge checks
# ---------------------------------------------------------------------------


def verify_labels(space: TruncationSpace, engine: LeftActionEngine | None = None) -> CheckReport:
    """k acts by q^-n and the Casimir by [l+1/2]^2 on each basis vector; the
    basis is h-orthogonal; m-grading matches."""
    engine = engine or default_engine(space.ring)
    ring = space.ring
    cq = casimir(ring)
    bad = None
    for b in space.basis:
        x = b.coeffs
        if engine.k(x) != x.scale(ring.v_pow(-b.n.twice)):
            bad = (b.key, "k")
            break
        if engine.act(cq, x) != x.scale(_casimir_value(b.l, ring) ** 2):
            bad = (b.key, "casimir")
            break
        if x.gradings() != {(b.m.twice, b.n.twice)}:
            bad = (b.key, "grading")
            break
    if bad is None:
        # orthogonality inside each component (different components are
        # orthogonal by grading)
        by_comp: dict = {}
        for b in space.basis:
            by_comp.setdefault((b.m.twice, b.n.twice), []).append(b)
        for vecs in by_comp.values():
            for i, u in enumerate(vecs):
                su = star(u.coeffs)
                for w in vecs[i:]:
                    g = _haar(su * w.coeffs)
                    expect = u.norm_sq if u is w else ring.zero
                    if g != expect:
                        bad = ((u.key, w.key), "orthogonality")
                        break
    return CheckReport("gns.labels", bad is None, {"N": space.N}, checked=space.dim, witness=bad)


def _exact_qint(t2: int, ring):
    """[t/2]_q for an integer t2 = 2t."""
    return (ring.v_pow(t2) - ring.v_pow(-t2)) / (ring.v_pow(2) - ring.v_pow(-2))


def verify_ef_fe(space: TruncationSpace, engine: LeftActionEngine | None = None) -> CheckReport:
    """E F and F E (operator composition) are diagonal with entries
    [l-n][l+n+1] and [l+n][l-n+1]; both are independent of the gauge and of
    the normalization of the basis."""
    E, F, _, _ = efk_matrices(space, engine)
    ring = space.ring
    EF, FE = E @ F, F @ E
    bad = None
    if not (EF.is_diagonal() and FE.is_diagonal()):
        bad = "not diagonal"
    else:
        for b in space.basis:
            l2, n2 = b.l.twice, b.n.twice
            ef = _exact_qint(l2 - n2, ring) * _exact_qint(l2 + n2 + 2, ring)
            fe = _exact_qint(l2 + n2, ring) * _exact_qint(l2 - n2 + 2, ring)
            if EF.entry(b.index, b.index) != ef or FE.entry(b.index, b.index) != fe:
                bad = b.key
                break
    return CheckReport("gns.ef_fe_diagonals", bad is None, {"N": space.N}, checked=space.dim, witness=bad)


def verify_modular_identity(x: AlgebraElement, space: TruncationSpace) -> CheckReport:
    """pi(sigma_L(x)) = Delta_L pi(x) Delta_L^-1 on the truncation.  Delta_L
    is diagonal, so it commutes with the compression and every row counts."""
    from .left_action import sigma_L

    lhs = multiplication_matrix(sigma_L(space.ring)(x), space)
    rhs = modular_operator(space) @ multiplication_matrix(x, space) @ modular_operator_inverse(space)
    bad = None
    for key in set(lhs.entries) | set(rhs.entries):
        if lhs.entry(*key) != rhs.entry(*key):
            bad = (space.basis[key[0]].key, space.basis[key[1]].key)
            break
    return CheckReport("gns.modular_identity", bad is None, {"N": space.N, "x": repr(x)},
                       checked=len(set(lhs.entries) | set(rhs.entries)), witness=bad)


def adjointness_error(space: TruncationSpace, q0, engine: LeftActionEngine | None = None) -> float:
    """max |E - F^T| in the orthonormal basis at q0."""
    E, F, _, _ = efk_matrices(space, engine)
    norms = space.norms_numeric(q0)
    return float(np.max(np.abs(E.to_numpy(q0, norms=norms) - F.to_numpy(q0, norms=norms).T)))


def _casimir_value(l: HalfInteger, ring):
    """[l + 1/2]_q."""
    t = l.twice + 1
    return (ring.v_pow(t) - ring.v_pow(-t)) / (ring.v_pow(2) - ring.v_pow(-2))


def _haar(x: AlgebraElement):
    total = x.ring.zero
    for m, c in x.terms.items():
        if m.diag == 0 and m.b == m.c:
            total = total + c * haar_monomial(m, x.ring)
    return total


def _expected_e(l2: int, n2: int, q0: float) -> float:
    """sqrt([l+n][l-n+1]) for E on xi^l_{mn}."""
    return math.sqrt(max(_qint((l2 + n2) / 2, q0) * _qint((l2 - n2) / 2 + 1, q0), 0.0))


def _qint(x: float, q0: float) -> float:
    return (q0**x - q0**-x) / (q0 - 1 / q0)


def _e_ratios(space: TruncationSpace, q0, engine, l_max2: int) -> list[tuple]:
    E, _, _, _ = efk_matrices(space, engine)
    M = E.to_numpy(q0)
    out = []
    for b in space.basis:
        if b.l.twice > l_max2:
            continue
        expected = _expected_e(b.l.twice, b.n.twice, float(q0))
        if expected == 0.0:
            continue
        i = space.index[(b.l.twice, b.m.twice, b.n.twice - 2)]
        out.append((b.key, abs(M[i, b.index]) / expected))
    return out


def gauge_mismatch(space: TruncationSpace, q0, engine: LeftActionEngine | None = None, l_max=3) -> float:
    """The constant factor between the measured |E| entries and
    sqrt([l+n][l-n+1]); raises if the factor is not constant to 1e-9."""
    q0 = _check_q0(q0)
    engine = engine or default_engine(space.ring)
    ratios = _e_ratios(space, q0, engine, int(2 * l_max))
    if not ratios:
        raise GaugeCalibrationError("the truncation has no l >= 1/2 block")
    r0 = ratios[0][1]
    for key, r in ratios:
        if abs(r - r0) > 1e-9 * abs(r0):
            raise GaugeCalibrationError(f"E-entry ratio not constant: {r} at {key} vs {r0}")
    return r0


def calibrate_gauge(space: TruncationSpace, q0, engine: LeftActionEngine | None = None, l_max=3):
    """The exact q-power rho* for which |E| entries equal sqrt([l+n][l-n+1])."""
    q0 = _check_q0(q0)
    if space.N < 2:
        raise GaugeCalibrationError("calibration needs the l = 1/2 and l = 1 blocks (N >= 2)")
    engine = engine or LeftActionEngine(1, space.ring if space.ring is EXACT else EXACT)
    r = gauge_mismatch(space, q0, engine, l_max)
    rho_num = EXACT.to_numeric(engine.gauge_rho, q0) / r
    if rho_num <= 0:
        raise GaugeCalibrationError("nonpositive gauge")
    t = round(2 * math.log(rho_num) / math.log(float(q0)))  # exponent of v
    rho = EXACT.v_pow(t)
    if abs(EXACT.to_numeric(rho, q0) - rho_num) > 1e-9 * rho_num:
        raise GaugeCalibrationError(f"no q-power fits the gauge {rho_num!r}")
    check = LeftActionEngine(rho, EXACT)
    if abs(gauge_mismatch(space, q0, check, l_max) - 1) > 1e-9:
        raise GaugeCalibrationError("re-verification of the fitted gauge failed")
    return rho


# ---------------------------------------------------------------------------
# Haar validation and growth constants
# ---------------------------------------------------------------------------


def gram_leading_minors(N: int, q0) -> list[Fraction]:
    """Leading principal minors of the monomial Gram matrix (degree <= N),
    exact at q = q0.  Monomials are ordered component by component, making
    the matrix block diagonal; the minors are running products of pivots."""
    ring = specialize(q0)
    space = build_truncation(N, ring)
    minors = []
    acc = Fraction(1)
    for _, (_, _, pivots) in sorted(space.gram_blocks().items()):
        for p in pivots:
            acc *= p
            minors.append(acc)
    return minors


def growth_constants(N: int, q0) -> dict:
    """Empirical constants for the l-raising and l-lowering parts of pi(a)
    and pi(c) in the orthonormal basis:

        C1 = sup |raising entry| / q^(n+l),   C2 = sup |lowering entry|.
    """
    ring = specialize(q0)
    space = build_truncation(N, ring)
    norms = space.norms_numeric(q0)
    qf = float(q0)
    out = {}
    for name, mono in (("a", MonomialA(1, 0, 0)), ("c", MonomialA(0, 0, 1))):
        M = multiplication_matrix(AlgebraElement.monomial(mono, 1, ring), space).to_numpy(q0, norms=norms)
        c1 = c2 = 0.0
        for j, b in enumerate(space.basis):
            for i in np.nonzero(M[:, j])[0]:
                tgt = space.basis[i]
                if tgt.l.twice > b.l.twice:
                    c1 = max(c1, abs(M[i, j]) / qf ** ((b.n.twice + b.l.twice) / 2))
                else:
                    c2 = max(c2, abs(M[i, j]))
        out[name] = {"C1": c1, "C2": c2}
    out["C1"] = max(out["a"]["C1"], out["c"]["C1"])
    out["C2"] = max(out["a"]["C2"], out["c"]["C2"])
    return out
