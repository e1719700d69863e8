import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsu2.coordinate_algebra import AlgebraElement, generators, monomials_up_to, star
from qsu2.enveloping_algebra import ugen
from qsu2.left_action import LeftActionEngine, default_engine, sigma_L
from qsu2.scalars import EXACT, q, v
from qsu2.suites import random_element_a

g = generators()
a, b, c, d = g["a"], g["b"], g["c"], g["d"]
one = AlgebraElement.scalar(1)
E = default_engine()
kappa = 1 / (q - 1 / q)

elements = st.integers(0, 2**32).map(lambda s: random_element_a(random.Random(s), 3))
monos = st.sampled_from(monomials_up_to(3)).map(AlgebraElement.monomial)
gauges = st.sampled_from([1, q, v**-3, EXACT(3) / 2])


def test_act_examples():
    assert E.act(ugen("k"), a) == a.scale(v)
    assert E.e(one).is_zero()
    assert E.f(one).is_zero()


def test_sigma_L_examples():
    assert sigma_L()(a) == a.scale(q)
    assert sigma_L()(one) == one


def test_derivation_examples():
    assert E.del2(one).is_zero()
    assert E.del2(a) == a.scale(q - 1)
    # del2 is inner for Y = -1: [Y, x]_sigma = Y x - sigma(x) Y
    for x in (a, b, c, d, a * b):
        assert E.del2(x) == x.scale(-1) - sigma_L()(x).scale(-1)


def test_twisted_leibniz():
    assert E.verify_twisted_leibniz(E.del1, 2).passed
    assert E.verify_twisted_leibniz(E.del3, 3).passed
    assert not E.verify_twisted_leibniz(E.del2, 2, twisted=False).passed


def test_zero_gauge_rejected():
    with pytest.raises(ValueError):
        LeftActionEngine(0)


@given(elements, gauges)
def test_U_relations_hold_as_endomorphisms(x, rho):
    eng = LeftActionEngine(rho)
    lhs = eng.e(eng.f(x)) - eng.f(eng.e(x))
    rhs = (eng.k_power(x, 2) - eng.k_power(x, -2)).scale(kappa)
    assert lhs == rhs
    assert eng.k(eng.e(x)) == eng.e(eng.k(x)).scale(q)
    assert eng.k(eng.kinv(x)) == x


@given(elements, elements)
def test_k_is_an_automorphism(x, y):
    assert E.k(x * y) == E.k(x) * E.k(y)
    assert E.k(one) == one


@given(monos)
def test_sigma_L_unitarity(x):
    s = sigma_L()
    assert s(star(x)) == star(s.inverse()(x))


@given(monos, monos)
def test_twisted_leibniz_random(x, y):
    s = sigma_L()
    for d_ in (E.del1, E.del3):
        assert d_(x * y) == d_(x) * y + s(x) * d_(y)
