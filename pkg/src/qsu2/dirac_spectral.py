"""The doubled space H = H_h + H_h, the q-Dirac operator and its spectral data.

    Delta = diag(K q^-1/2, K q^1/2)
    D     = [[(q^-1 K^2 - 1)/(q - q^-1),  E K q^1/2          ],
             [F K q^-1/2,                 (1 - q K^2)/(q - q^-1)]]

A doubled basis vector is (component, t^l_{m n'}).  Its Delta-eigenvalue is
q^n with eigenlevel n = -n' - 1/2 on the first component and -n' + 1/2 on the
second, and |D_q| acts on it by q^n [l + 1/2].

D, Delta and |D_q| preserve every A_l + A_l, so they commute with the
projection onto a truncation and all identities involving them can be
checked on the full truncation, not only on its interior.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coordinate_algebra import AlgebraElement
from .enveloping_algebra import casimir
from .gns_rep import (
    TruncatedOperator,
    TruncationSpace,
    build_truncation,
    efk_matrices,
    multiplication_matrix,
    operator_matrix,
)
from .left_action import LeftActionEngine, default_engine, sigma_L
from .reports import CheckReport
from .scalars import EXACT, HalfInteger, _check_q0, specialize

__all__ = [
    "DoubledSpace",
    "BlockOperator2x2",
    "PsiWeights",
    "build_dirac",
    "delta_operator",
    "casimir_operator",
    "dirac_squared_identity",
    "dirac_delta_commutator",
    "diagonal_anticommutation",
    "twisted_commutator_symbolic",
    "verify_twisted_commutator",
    "abs_dirac",
    "abs_dirac_eigenvalue",
    "lipschitz_sup",
    "psi_trace",
    "projection",
    "multiplicities",
    "multiplicity",
    "resolvent_trace_partial",
    "ResolventPartial",
    "spectrum_rows",
    "spectrum_csv",
]


class DoubledSpace:
    """Two copies of a truncation; index c*dim + i is component c+1, vector i."""

    def __init__(self, base: TruncationSpace):
        self.base = base
        self.ring = base.ring
        self.labels = []
        for comp in (1, 2):
            shift = -1 if comp == 1 else 1
            for b in base.basis:
                # (2l, 2m, 2n', component, 2n)
                self.labels.append((b.l.twice, b.m.twice, b.n.twice, comp, -b.n.twice + shift))

    @property
    def dim(self) -> int:
        return 2 * self.base.dim

    @property
    def N(self) -> int:
        return self.base.N

    def norms_numeric(self, q0) -> np.ndarray:
        n = self.base.norms_numeric(q0)
        return np.concatenate([n, n])

    def eigenlevel(self, i: int) -> HalfInteger:
        return HalfInteger(self.labels[i][4])


@dataclass
class BlockOperator2x2:
    """[[b11, b12], [b21, b22]] with entries TruncatedOperators on one base
    space, or AlgebraElements (a matrix over A)."""

    b11: object
    b12: object
    b21: object
    b22: object

    def blocks(self):
        return (self.b11, self.b12, self.b21, self.b22)

    @staticmethod
    def _mul(x, y):
        return x @ y if isinstance(x, TruncatedOperator) else x * y

    def __matmul__(self, o: BlockOperator2x2) -> BlockOperator2x2:
        m = self._mul
        return BlockOperator2x2(
            m(self.b11, o.b11) + m(self.b12, o.b21),
            m(self.b11, o.b12) + m(self.b12, o.b22),
            m(self.b21, o.b11) + m(self.b22, o.b21),
            m(self.b21, o.b12) + m(self.b22, o.b22),
        )

    __mul__ = __matmul__

    def __add__(self, o: BlockOperator2x2) -> BlockOperator2x2:
        return BlockOperator2x2(*(x + y for x, y in zip(self.blocks(), o.blocks())))

    def __sub__(self, o: BlockOperator2x2) -> BlockOperator2x2:
        return BlockOperator2x2(*(x - y for x, y in zip(self.blocks(), o.blocks())))

    def scale(self, s) -> BlockOperator2x2:
        return BlockOperator2x2(*(x.scale(s) for x in self.blocks()))

    def __eq__(self, o) -> bool:
        return isinstance(o, BlockOperator2x2) and all(x == y for x, y in zip(self.blocks(), o.blocks()))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.blocks())

    def map(self, fn) -> BlockOperator2x2:
        return BlockOperator2x2(*(fn(x) for x in self.blocks()))

    def trace(self):
        """Tr of the 2x2 matrix (entries summed on the diagonal)."""
        return self.b11 + self.b22

    def assemble(self, space: DoubledSpace) -> TruncatedOperator:
        d = space.base.dim
        entries = {}
        for (r, c), blk in zip(((0, 0), (0, 1), (1, 0), (1, 1)), self.blocks()):
            for (i, j), v in blk.entries.items():
                entries[(i + r * d, j + c * d)] = v
        return TruncatedOperator(space, entries, space.ring)

    @classmethod
    def diagonal(cls, x, y, zero) -> BlockOperator2x2:
        return cls(x, zero, zero, y)


@dataclass(frozen=True)
class PsiWeights:
    """Eigenlevel n carries weight q^(s n); s = 1 is the trace Psi."""

    s: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        if self.s <= 0:
            raise ValueError("s must be positive")


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


def _kappa(ring):
    return ring.one / (ring.q_pow(1) - ring.q_pow(-1))


def _diag(space: TruncationSpace, fn) -> TruncatedOperator:
    return TruncatedOperator.diagonal(space, [fn(b) for b in space.basis], space.ring)


def build_dirac(space: DoubledSpace, engine: LeftActionEngine | None = None) -> BlockOperator2x2:
    base, ring = space.base, space.ring
    engine = engine or default_engine(ring)
    E, F, K, _ = efk_matrices(base, engine)
    kappa = _kappa(ring)
    # K^2 = q^(-2n') = v^(-2 * 2n')
    d11 = _diag(base, lambda b: (ring.v_pow(-2 - 2 * b.n.twice) - ring.one) * kappa)
    d22 = _diag(base, lambda b: (ring.one - ring.v_pow(2 - 2 * b.n.twice)) * kappa)
    return BlockOperator2x2(d11, (E @ K).scale(ring.v_pow(1)), (F @ K).scale(ring.v_pow(-1)), d22)


def delta_operator(space: DoubledSpace, power: int = 1) -> BlockOperator2x2:
    """Delta^power = diag(K^p q^(-p/2), K^p q^(p/2))."""
    base, ring = space.base, space.ring
    z = TruncatedOperator.zero(base, ring)
    return BlockOperator2x2(
        _diag(base, lambda b: ring.v_pow(-power * (b.n.twice + 1))),
        z, z,
        _diag(base, lambda b: ring.v_pow(-power * (b.n.twice - 1))),
    )


def casimir_operator(base: TruncationSpace, engine: LeftActionEngine | None = None) -> TruncatedOperator:
    """The matrix of the Casimir, computed from its left action."""
    engine = engine or default_engine(base.ring)
    cq = casimir(base.ring)
    return operator_matrix(lambda x: engine.act(cq, x), base, strict=True)


def _first_label_mismatch(lhs: TruncatedOperator, rhs: TruncatedOperator, labels):
    keys = set(lhs.entries) | set(rhs.entries)
    for k in sorted(keys):
        if lhs.entry(*k) != rhs.entry(*k):
            return (labels[k[0]], labels[k[1]])
    return None


def dirac_squared_identity(space: DoubledSpace, engine: LeftActionEngine | None = None) -> CheckReport:
    """D^2 = c_q Delta^2, compared as exact block matrices."""
    D = build_dirac(space, engine)
    cq = casimir_operator(space.base, engine)
    z = TruncatedOperator.zero(space.base, space.ring)
    C = BlockOperator2x2(cq, z, z, cq)
    lhs = (D @ D).assemble(space)
    rhs = (C @ delta_operator(space, 2)).assemble(space)
    bad = _first_label_mismatch(lhs, rhs, space.labels)
    return CheckReport(
        "dirac.D2_equals_casimir_delta2", bad is None, {"N": space.N},
        checked=space.dim, witness=bad, details={"diagonal": lhs.is_diagonal()},
    )


def dirac_delta_commutator(space: DoubledSpace, engine: LeftActionEngine | None = None) -> CheckReport:
    D = build_dirac(space, engine)
    De = delta_operator(space)
    comm = (D @ De - De @ D).assemble(space)
    return CheckReport("dirac.D_Delta_commute", comm.is_zero(), {"N": space.N}, checked=space.dim,
                       witness=None if comm.is_zero() else min(comm.entries))


def diagonal_anticommutation(space: DoubledSpace, engine: LeftActionEngine | None = None) -> CheckReport:
    D = build_dirac(space, engine)
    z = TruncatedOperator.zero(space.base, space.ring)
    diag = BlockOperator2x2(D.b11, z, z, D.b22)
    off = BlockOperator2x2(z, D.b12, D.b21, z)
    anti = (diag @ off + off @ diag).assemble(space)
    return CheckReport("dirac.diag_offdiag_anticommute", anti.is_zero(), {"N": space.N}, checked=space.dim)


def twisted_commutator_symbolic(x: AlgebraElement, engine: LeftActionEngine | None = None) -> BlockOperator2x2:
    """D_q x - sigma_L(x) D_q as a 2x2 matrix over A:

        [[(q - q^-1)^-1 d2(x),  q^1/2 d3(x)          ],
         [q^-1/2 d1(x),         -(q - q^-1)^-1 d2(x) ]]
    """
    ring = x.ring
    engine = engine or default_engine(ring)
    kappa = _kappa(ring)
    d2 = engine.del2(x).scale(kappa)
    return BlockOperator2x2(d2, engine.del3(x).scale(ring.v_pow(1)), engine.del1(x).scale(ring.v_pow(-1)), -d2)


def _pi_hat(x: AlgebraElement, base: TruncationSpace) -> BlockOperator2x2:
    P = multiplication_matrix(x, base)
    z = TruncatedOperator.zero(base, base.ring)
    return BlockOperator2x2(P, z, z, P)


def verify_twisted_commutator(
    x: AlgebraElement, space: DoubledSpace, engine: LeftActionEngine | None = None, interior: bool = False
) -> CheckReport:
    """Compare D pi(x) - pi(sigma_L x) D with the compressed symbolic
    right-hand side.  Both sides are compressions by the truncation
    projection, which commutes with D, so the comparison is exact on every
    row and column; ``interior`` restricts it to rows and columns whose
    l-neighbours (l +- deg(x)/2) are inside the truncation."""
    engine = engine or default_engine(space.ring)
    base = space.base
    D = build_dirac(space, engine)
    sx = sigma_L(space.ring)(x)
    lhs = (D @ _pi_hat(x, base) - _pi_hat(sx, base) @ D).assemble(space)
    sym = twisted_commutator_symbolic(x, engine)
    rhs = sym.map(lambda y: multiplication_matrix(y, base)).assemble(space)
    if interior:
        keep = [i for i, lab in enumerate(space.labels) if lab[0] + x.degree() <= base.N]
        lhs = lhs.restrict(keep, keep)
        rhs = rhs.restrict(keep, keep)
    bad = _first_label_mismatch(lhs, rhs, space.labels)
    return CheckReport(
        "dirac.twisted_commutator", bad is None,
        {"N": base.N, "x": repr(x), "rows": "interior" if interior else "all"},
        checked=len(set(lhs.entries) | set(rhs.entries)), witness=bad,
    )


def abs_dirac_eigenvalue(l2: int, n2: int, ring=EXACT):
    """q^n [l + 1/2] from twice the labels."""
    t = l2 + 1
    return ring.v_pow(n2) * (ring.v_pow(t) - ring.v_pow(-t)) / (ring.v_pow(2) - ring.v_pow(-2))


def abs_dirac(space: DoubledSpace) -> BlockOperator2x2:
    base, ring = space.base, space.ring
    z = TruncatedOperator.zero(base, ring)
    return BlockOperator2x2(
        _diag(base, lambda b: abs_dirac_eigenvalue(b.l.twice, -b.n.twice - 1, ring)),
        z, z,
        _diag(base, lambda b: abs_dirac_eigenvalue(b.l.twice, -b.n.twice + 1, ring)),
    )


def _qint(x: float, q: float) -> float:
    return (q**x - q**-x) / (q - 1 / q)


def lipschitz_sup(x: AlgebraElement, q0, N: int) -> dict:
    """Entrywise sup of [|D_q|, x]_{sigma_L} = |D_q| x - sigma_L(x) |D_q| on the
    orthonormal doubled basis, at q = q0 and truncation N.

    ``x`` is given over Q(v); it is specialized to q0 (its coefficients must
    be rational there).  The sup is also split into l-raising and l-lowering
    entries; ``raising_C1`` divides the raising sup by the empirical C1 of
    pi(a), pi(c) at the same N.
    """
    from .gns_rep import growth_constants

    q0 = _check_q0(q0)
    ring = specialize(q0)
    xs = x if x.ring is ring else x.map_coefficients(ring, ring)
    base = build_truncation(N, ring)
    norms = base.norms_numeric(q0)
    P = multiplication_matrix(xs, base).to_numpy(q0, norms=norms)
    Ps = multiplication_matrix(sigma_L(ring)(xs), base).to_numpy(q0, norms=norms)
    qf = float(q0)
    out = {"N": N, "q": str(q0), "x": repr(x)}
    sup = raise_sup = lower_sup = 0.0
    comp_sup = {}
    l2 = np.array([b.l.twice for b in base.basis])
    for comp, shift in ((1, -1), (2, 1)):
        lam = np.array([qf ** ((-b.n.twice + shift) / 2) * _qint((b.l.twice + 1) / 2, qf) for b in base.basis])
        C = lam[:, None] * P - Ps * lam[None, :]
        A = np.abs(C)
        comp_sup[comp] = float(A.max()) if A.size else 0.0
        up = l2[:, None] > l2[None, :]
        down = l2[:, None] < l2[None, :]
        raise_sup = max(raise_sup, float(A[up].max()) if up.any() else 0.0)
        lower_sup = max(lower_sup, float(A[down].max()) if down.any() else 0.0)
        sup = max(sup, comp_sup[comp])
    c1 = growth_constants(N, q0)["C1"]
    out.update(
        sup=sup, raising_sup=raise_sup, lowering_sup=lower_sup,
        component_sup=comp_sup, C1=float(c1), raising_C1=raise_sup / float(c1) if c1 else 0.0,
    )
    return out


# ---------------------------------------------------------------------------
# Trace, multiplicities, resolvent
# ---------------------------------------------------------------------------


def projection(space: DoubledSpace, n, l) -> TruncatedOperator:
    """P_{n,l}: onto H_n intersected with A_l + A_l."""
    n2, l2 = HalfInteger.of(n).twice, HalfInteger.of(l).twice
    vals = [space.ring.one if (lab[0] == l2 and lab[4] == n2) else space.ring.zero for lab in space.labels]
    return TruncatedOperator.diagonal(space, vals, space.ring)


def psi_trace(T: TruncatedOperator, space: DoubledSpace, weights: PsiWeights = PsiWeights(), q0=None):
    """Psi_s(T) = sum_i q^(s n_i) T_ii for T diagonal in the labeled basis.

    Exact when every weight q^(s n) is a power of v; otherwise numeric and
    ``q0`` is required.
    """
    if not T.is_diagonal():
        raise ValueError("psi_trace is defined here only for diagonal operators")
    ring = space.ring
    s = weights.s
    exact = all((s * lab[4]).denominator == 1 for lab in space.labels) and q0 is None
    if exact:
        total = ring.zero
        for (i, _), v in T.entries.items():
            total = total + v * ring.v_pow(int(s * space.labels[i][4]))
        return total
    if q0 is None:
        raise ValueError("non-integral weights q^(s n) need a numeric q0")
    q0 = _check_q0(q0)
    qf = float(q0)
    total = 0.0
    for (i, _), v in T.entries.items():
        val = ring.to_numeric(v, q0) if hasattr(ring, "to_numeric") else float(v)
        total += val * qf ** (float(s) * space.labels[i][4] / 2)
    return total


def multiplicity(l, n) -> int:
    """dim(H_n intersected with A_l + A_l) from the label rules."""
    l2, n2 = HalfInteger.of(l).twice, HalfInteger.of(n).twice
    count = 0
    for shift in (-1, 1):
        np2 = -n2 + shift  # twice n'
        if -l2 <= np2 <= l2 and (np2 - l2) % 2 == 0:
            count += 1
    return count * (l2 + 1)


def multiplicities(space: DoubledSpace) -> dict:
    """{(2l, 2n): count} by enumeration of the doubled basis."""
    out: dict = {}
    for lab in space.labels:
        key = (lab[0], lab[4])
        out[key] = out.get(key, 0) + 1
    return out


@dataclass
class ResolventPartial:
    L: HalfInteger
    q: Fraction
    value: float
    majorant: float
    crude_bound: float
    terms: list

    def as_dict(self) -> dict:
        return {"L": str(self.L), "q": str(self.q), "value": self.value,
                "majorant": self.majorant, "crude_bound": self.crude_bound}


def resolvent_trace_partial(L, q0) -> ResolventPartial:
    """Sum over l <= L of mult(n, l) (1 + q^(2n) [l+1/2]^2)^(-1/2) q^n.

    ``majorant`` is sum_{l <= L} 2(2l+1)(2l+2) / [l+1/2]; ``crude_bound``
    is the intermediate bound with 2(2l+1) in place of the exact
    multiplicity.
    """
    L = HalfInteger.of(L)
    q0 = _check_q0(q0)
    qf = float(q0)
    value = major = crude = 0.0
    terms = []
    for l2 in range(L.twice + 1):
        ql = _qint((l2 + 1) / 2, qf)
        block = pblock = 0.0
        for n2 in range(-l2 - 1, l2 + 2, 2):
            mult = multiplicity(HalfInteger(l2), HalfInteger(n2))
            qn = qf ** (n2 / 2)
            f = qn / math.sqrt(1 + (qn * ql) ** 2)
            block += mult * f
            pblock += 2 * (l2 + 1) * f
        value += block
        crude += pblock
        major += 2 * (l2 + 1) * (l2 + 2) / ql
        terms.append(block)
    return ResolventPartial(L, q0, value, major, crude, terms)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def spectrum_rows(N: int, q0, ring=EXACT) -> list[dict]:
    """One row per doubled basis vector: (l, m, n', component, n, |D_q|
    eigenvalue, multiplicity of (n, l), Psi weight q^n), sorted."""
    q0 = _check_q0(q0)
    space = DoubledSpace(build_truncation(N, ring))
    mult = multiplicities(space)
    rows = []
    for l2, m2, np2, comp, n2 in space.labels:
        ev = abs_dirac_eigenvalue(l2, n2, EXACT)
        rows.append({
            "l": str(HalfInteger(l2)), "m": str(HalfInteger(m2)), "n_prime": str(HalfInteger(np2)),
            "component": comp, "n": str(HalfInteger(n2)),
            "abs_D_exact": str(ev), "abs_D": EXACT.to_numeric(ev, q0),
            "multiplicity": mult[(l2, n2)], "psi_weight": float(q0) ** (n2 / 2),
            "_key": (l2, n2, comp, m2, np2),
        })
    rows.sort(key=lambda r: r["_key"])
    for r in rows:
        del r["_key"]
    return rows


def spectrum_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
