import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsu2 import hochschild as hs
from qsu2.coordinate_algebra import (
    AlgebraElement,
    DiagonalAutomorphism,
    MonomialA,
    haar_state,
    monomials_up_to,
    transpose_automorphism,
)
from qsu2.left_action import sigma_L
from qsu2.scalars import EXACT, q, v

ONE = MonomialA(0, 0, 0)
A_, B_, C_, D_ = MonomialA(1, 0, 0), MonomialA(0, 1, 0), MonomialA(0, 0, 1), MonomialA(-1, 0, 0)


@pytest.fixture(scope="module")
def h():
    return hs.haar_trace()


@pytest.fixture(scope="module")
def dd():
    return hs.standard_derivations()


def as_cochain(tau):
    return hs.TwistedCochain(1, lambda t: tau.on_monomial(t[0]), tau.alpha, tau.ring, name=tau.name)


def test_modular_parameters():
    lam, mu = hs.derive_modular_parameters("1/2")
    assert lam == mu == 1 / q


def test_haar_is_not_a_trace():
    ident = hs.TwistedTrace(haar_state, DiagonalAutomorphism(1, 1), verify=False)
    rep = ident.twisted_trace_report(1)
    assert not rep.passed
    x, y = rep.witness
    assert haar_state(x * y) != haar_state(y * x)


def test_haar_twisted_trace(h):
    assert h.twisted_trace_report(4).passed
    assert h.invariance_report(degree=4).passed
    assert h.alpha(sigma_L()(AlgebraElement.monomial(A_))) == sigma_L()(h.alpha(AlgebraElement.monomial(A_)))


def test_coboundary_of_twisted_trace(h):
    rep = hs.check_zero("b(tau)", hs.coboundary(as_cochain(h)), hs.exhaustive_tuples(2, 3))
    assert rep.passed


def test_counit_precondition():
    with pytest.raises(hs.PreconditionError, match="sigma_L"):
        hs.TwistedTrace(hs.counit_trace().functional, DiagonalAutomorphism(1, 1))
    with pytest.raises(hs.PreconditionError) as info:
        hs.triviality_certificate(hs.counit_trace())
    assert info.value.witness is not None


def test_noncommuting_alpha_rejected(dd):
    bad = hs.TwistedTrace(haar_state, transpose_automorphism(), verify=False)
    with pytest.raises(hs.PreconditionError, match="theta o alpha"):
        hs.build_local_cochain(bad, [dd[1]])


def test_derivations_verify(dd):
    for d in dd.values():
        assert d.verify(2).passed
    assert dd[2].kind == "inner" and dd[2].Y == AlgebraElement.scalar(-1)


def test_local_cochain_n1(h, dd):
    phi = hs.build_local_cochain(h, [dd[1]])
    assert phi.sigma == DiagonalAutomorphism(1 / q, EXACT.one)
    tuples = hs.exhaustive_tuples(3, 2) + hs.balanced_tuples(3, 2, 50, 1, target=(0, -2))
    assert hs.check_zero("b(phi)", hs.coboundary(phi), tuples).passed


@pytest.mark.parametrize("s", hs._PERMS)
def test_local_cocycles(h, dd, s):
    phi = hs.build_local_cochain(h, [dd[i] for i in s])
    tuples = hs.exhaustive_tuples(5, 1) + hs.balanced_tuples(5, 2, 30, 0)
    assert hs.check_zero("b(phi_s)", hs.coboundary(phi), tuples).passed
    assert phi.equivariance_report(hs.exhaustive_tuples(4, 1)).passed


def test_transgression_exhaustive(h, dd):
    phi = hs.build_local_cochain(h, [dd[1], dd[2], dd[3]])
    phi2 = hs.transgress(phi, 2)
    tuples = hs.exhaustive_tuples(4, 2)
    rep = hs.check_identity("b(phi_2) = phi", hs.coboundary(phi2), phi, tuples)
    assert rep.passed and rep.checked == 38416


def test_transgression_needs_inner(h, dd):
    phi = hs.build_local_cochain(h, [dd[1], dd[2], dd[3]])
    with pytest.raises(hs.PreconditionError):
        hs.transgress(phi, 1)
    with pytest.raises(ValueError):
        hs.transgress(phi, 4)


def test_degenerate_inner_derivation(h, dd):
    zero = hs.DerivationSpec.inner(AlgebraElement.scalar(0), sigma_L(), name="zero")
    phi = hs.build_local_cochain(h, [dd[1], zero, dd[3]])
    phi2 = hs.transgress(phi, 2)
    for t in hs.exhaustive_tuples(3, 1):
        assert phi2.on_monomials(t) == 0
    for t in hs.exhaustive_tuples(4, 1):
        assert phi.on_monomials(t) == 0


def test_dirac_cochain(h):
    phi = hs.build_dirac_cochain(h, 1)
    assert phi.on_monomials((ONE,) * 4) == 0
    assert phi.sigma == h.alpha.compose(sigma_L().power(-3))
    combined, parts = hs.dirac_decomposition(h, 1)
    assert len(parts) == 6
    tuples = hs.balanced_tuples(4, 2, 50, 3)
    assert hs.check_identity("decomposition", phi, combined, tuples).passed
    assert any(phi.on_monomials(t) != 0 for t in tuples)


def test_dirac_words():
    assert len(hs.dirac_words(1)) == 6
    assert len(hs.dirac_words(2)) == 30
    kappa = 1 / (q - 1 / q)
    for word, coeff in hs.dirac_words(1):
        assert sorted(word) == [1, 2, 3]
        assert coeff in (kappa, -kappa)


def test_certificate_for_haar(h):
    cert = hs.triviality_certificate(h)
    assert cert["passed"]
    assert len(cert["checks"]) == 8
    assert all(c["tuples_checked"] == 38516 for c in cert["checks"])
    assert cert["sigma_params"]["mu_h"] == str(v**4)


def test_certificate_for_twisted_haar():
    (twist,) = hs.random_haar_twists(1, seed=5)
    cert = hs.triviality_certificate(hs.haar_trace(twist=twist), samples=20)
    assert cert["passed"]
    assert cert["tau_params"]["kind"] == "haar_twisted"


def test_certificate_detects_wrong_sign(h, dd):
    phi = hs.build_dirac_cochain(h, 1)
    phi_s = hs.build_local_cochain(h, [dd[1], dd[2], dd[3]])
    wrong = hs.combine([(EXACT.one, phi), (EXACT.one, phi_s)])
    rep = hs.check_identity("wrong", wrong, phi, hs.balanced_tuples(4, 2, 200, 0))
    assert not rep.passed and rep.witness is not None


def test_parallel_checks_agree(h):
    phi = hs.build_local_cochain(h, [hs.standard_derivations()[i] for i in (2, 1, 3)])
    tuples = hs.exhaustive_tuples(4, 2)[:5000]
    serial = hs.check_zero("b", phi, tuples, workers=1)
    parallel = hs.check_zero("b", phi, tuples, workers=2)
    assert serial.as_dict() == parallel.as_dict()


@given(st.integers(0, 10**6), st.integers(1, 2))
def test_coboundary_squares_to_zero(seed, arity):
    sigma = hs.build_dirac_cochain(hs.haar_trace(), 1).sigma
    r = hs.random_cochain(arity, sigma, seed=seed)
    bb = hs.coboundary(hs.coboundary(r))
    rng = random.Random(seed)
    pool = monomials_up_to(2)
    tuples = [tuple(rng.choice(pool) for _ in range(arity + 2)) for _ in range(40)]
    tuples += hs.balanced_tuples(arity + 2, 2, 20, seed)
    assert hs.check_zero("bb", bb, tuples, workers=1).passed


@given(st.integers(0, 10**6))
def test_random_twist_traces_are_valid(seed):
    (twist,) = hs.random_haar_twists(1, seed=seed)
    tau = hs.haar_trace(twist=twist, check_degree=2)
    assert tau.alpha == hs.haar_trace().alpha


@given(st.integers(0, 10**6))
def test_balanced_tuples_are_balanced(seed):
    for t in hs.balanced_tuples(4, 3, 10, seed):
        assert all(m.degree == 3 for m in t)
        assert (sum(m.grading[0] for m in t), sum(m.grading[1] for m in t)) == (0, 0)


def test_unreachable_grading_raises():
    with pytest.raises(ValueError):
        hs.balanced_tuples(3, 3, 5, 0, target=(0, -2))
