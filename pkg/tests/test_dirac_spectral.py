import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsu2.coordinate_algebra import AlgebraElement, generators, monomials_of_degree
from qsu2.dirac_spectral import (
    PsiWeights,
    abs_dirac,
    abs_dirac_eigenvalue,
    build_dirac,
    delta_operator,
    diagonal_anticommutation,
    dirac_delta_commutator,
    dirac_squared_identity,
    lipschitz_sup,
    multiplicities,
    multiplicity,
    projection,
    psi_trace,
    resolvent_trace_partial,
    spectrum_csv,
    spectrum_rows,
    twisted_commutator_symbolic,
    verify_twisted_commutator,
    DoubledSpace,
)
from qsu2.gns_rep import build_truncation
from qsu2.scalars import EXACT, HalfInteger, q, specialize

HALF = Fraction(1, 2)
g = generators()


def doubled(N, ring=EXACT):
    return DoubledSpace(build_truncation(N, ring))


def test_dirac_on_constant():
    D = build_dirac(doubled(2))
    assert D.b11.entries[(0, 0)] == -1 / (1 + q)
    assert not any(j == 0 for (_, j) in D.b21.entries)


def test_offdiagonal_block_kills_lowest_weight():
    sp = doubled(4)
    D = build_dirac(sp)
    lowest = {b.index for b in sp.base.basis if b.n.twice == -b.l.twice}
    assert not any(j in lowest for (_, j) in D.b12.entries)


@pytest.mark.parametrize("N", [0, 1, 2, 4, 6])
def test_exact_identities(N):
    sp = doubled(N)
    assert dirac_squared_identity(sp).passed
    assert dirac_delta_commutator(sp).passed
    assert diagonal_anticommutation(sp).passed


# the specialized ring needs sqrt(q) rational
@pytest.mark.parametrize("q0", [Fraction(1, 4), Fraction(9, 16)])
def test_identities_at_rational_q(q0):
    sp = doubled(4, specialize(q0))
    assert dirac_squared_identity(sp).passed
    assert dirac_delta_commutator(sp).passed


def test_D_squared_eigenvalues():
    sp = doubled(1)
    D = build_dirac(sp)
    D2 = (D @ D).assemble(sp)
    for i, (l2, _, _, _, n2) in enumerate(sp.labels):
        assert D2.entries[(i, i)] == abs_dirac_eigenvalue(l2, n2) ** 2


def test_twisted_commutator_examples():
    assert twisted_commutator_symbolic(AlgebraElement.scalar(1)).is_zero()
    T = twisted_commutator_symbolic(g["a"])
    assert T.b11 == g["a"].scale(q / (q + 1))


@pytest.mark.parametrize("name", "abcd")
def test_twisted_commutator_generators(name):
    assert verify_twisted_commutator(g[name], doubled(6), interior=True).passed


def test_twisted_commutator_degree_two():
    sp = doubled(6)
    for m in monomials_of_degree(2):
        assert verify_twisted_commutator(AlgebraElement.monomial(m), sp, interior=True).passed


def test_abs_dirac():
    sp = doubled(6)
    A = abs_dirac(sp)
    assert A.b11.entries[(0, 0)] == 1 / (1 + q)
    D = build_dirac(sp)
    A2, D2 = (A @ A).assemble(sp), (D @ D).assemble(sp)
    assert all(A2.entries[(i, i)] == D2.entries.get((i, i)) for i in range(sp.dim))
    for blk in (A.b11, A.b22):
        assert all(EXACT.to_numeric(x, HALF) > 0 for x in blk.entries.values())
    assert len(A.b11.entries) == sp.base.dim


def test_delta_commutes_with_abs():
    sp = doubled(4)
    A, Dl = abs_dirac(sp), delta_operator(sp)
    assert (A @ Dl) == (Dl @ A)


def test_psi_examples():
    sp = doubled(6)
    assert psi_trace(projection(sp, HALF, 0), sp) == EXACT.v_pow(1)
    mult = multiplicities(sp)
    for (l2, n2), count in mult.items():
        if l2 <= 6:
            assert count == multiplicity(HalfInteger(l2), HalfInteger(n2))
            bound = 2 * (l2 + 1) * 0.5 ** (n2 / 2)
            assert EXACT.to_numeric(psi_trace(projection(sp, HalfInteger(n2), HalfInteger(l2)), sp), HALF) <= bound


def test_psi_weights_family():
    sp = doubled(2)
    P = projection(sp, HALF, 0)
    assert psi_trace(P, sp, PsiWeights(2)) == EXACT.v_pow(2)
    assert psi_trace(P, sp, PsiWeights(Fraction(1, 2)), q0=HALF) == pytest.approx(0.5**0.25)
    with pytest.raises(ValueError):
        PsiWeights(0)


def test_psi_identity_two_enumerations():
    sp = doubled(4)
    total = EXACT.zero
    for l2 in range(5):
        for n2 in range(-l2 - 1, l2 + 2, 2):
            total = total + psi_trace(projection(sp, HalfInteger(n2), HalfInteger(l2)), sp)
    direct = EXACT.zero
    for lab in sp.labels:
        direct = direct + EXACT.v_pow(lab[4])
    assert total == direct


def test_resolvent_low_order():
    # L = 0: the two eigenlevels n = -1/2, 1/2 each with multiplicity 1
    qhalf = 1 / (math.sqrt(0.5) + math.sqrt(2))
    expected = sum(0.5**n / math.sqrt(1 + 0.5 ** (2 * n) * qhalf**2) for n in (-0.5, 0.5))
    assert resolvent_trace_partial(0, HALF).value == pytest.approx(expected, rel=1e-14)


def test_resolvent_majorant_and_convergence():
    prev = 0.0
    for L2 in range(61):
        r = resolvent_trace_partial(Fraction(L2, 2), HALF)
        assert r.value <= r.majorant + 1e-12
        assert r.value >= prev
        prev = r.value
    diff = abs(resolvent_trace_partial(80, HALF).value - resolvent_trace_partial(60, HALF).value)
    assert diff < 1e-8


def test_lipschitz_constant_is_zero():
    assert lipschitz_sup(AlgebraElement.scalar(1), HALF, 4)["sup"] == 0


def test_lipschitz_sup_increases_slowly():
    s6 = lipschitz_sup(g["a"], HALF, 6)["sup"]
    s8 = lipschitz_sup(g["a"], HALF, 8)["sup"]
    assert 0 < s6 <= s8 < s6 + 1e-3


def test_spectrum_rows():
    rows = spectrum_rows(6, HALF)
    assert len(rows) == 2 * sum((l2 + 1) ** 2 for l2 in range(7))
    first = rows[0]
    assert (first["l"], first["n"], first["component"]) == ("0", "-1/2", 1)
    assert first["abs_D"] == pytest.approx(1 / 1.5)
    for r in rows:
        # multiplicity counts (2l+1) per contributing component
        assert r["multiplicity"] % (int(2 * Fraction(r["l"])) + 1) == 0
    text = spectrum_csv(rows)
    assert text.splitlines()[0].startswith("l,m,n_prime,component,n")
    assert spectrum_csv(spectrum_rows(6, HALF)) == text


@given(st.integers(0, 12), st.integers(-13, 13))
def test_multiplicity_rule(l2, n2):
    m = multiplicity(HalfInteger(l2), HalfInteger(n2)) if (l2 + n2) % 2 == 1 else 0
    assert m in (0, l2 + 1, 2 * (l2 + 1))
    if abs(n2) > l2 + 1:
        assert m == 0
