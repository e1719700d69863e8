import random

from hypothesis import given
from hypothesis import strategies as st

from qsu2.enveloping_algebra import MonomialU, casimir, casimir_alt, star_u, ugen
from qsu2.scalars import q
from qsu2.suites import random_element_u

e, f, k, kinv = ugen("e"), ugen("f"), ugen("k"), ugen("kinv")
one = ugen("1")
kappa = 1 / (q - 1 / q)

elements = st.integers(0, 2**32).map(lambda s: random_element_u(random.Random(s), 3))


def test_ef_relation():
    assert e * f == f * e + (k * k - kinv * kinv).scale(kappa)


def test_k_relations():
    assert k * e == (e * k).scale(q)
    assert k * f == (f * k).scale(1 / q)
    assert k * kinv == one
    # normal form keeps k to the left of e
    assert set((k * e).terms) == {MonomialU(0, 1, 1)}


def test_star_examples():
    assert star_u(e) == f
    assert star_u(k) == k
    assert star_u(k * e) == f * k


def test_casimir_presentations_agree():
    assert casimir() == casimir_alt()


def test_casimir_central_and_selfadjoint():
    cq = casimir()
    for x in (e, f, k, kinv):
        assert cq * x == x * cq
    assert star_u(cq) == cq


@given(elements, elements, elements)
def test_associativity(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(elements, elements)
def test_star_laws(x, y):
    assert star_u(star_u(x)) == x
    assert star_u(x * y) == star_u(y) * star_u(x)


@given(elements)
def test_casimir_commutes_with_random_elements(x):
    assert casimir() * x == x * casimir()
