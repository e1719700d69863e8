import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsu2.scalars import DivergenceError, PoleError
from qsu2.suites import ZETA_MINUS_ONE_HALF
from qsu2.zeta import (
    nearest_pole,
    pole_diagnostic,
    pole_location,
    psi_cross_check,
    regular_point_diagnostic,
    spectral_dimension_sweep,
    zeta_closed_form,
    zeta_direct,
)

HALF = Fraction(1, 2)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_methods_agree_at_two():
    assert rel(zeta_direct(2, HALF, 60).value, zeta_closed_form(2, HALF).value) < 1e-8


def test_zero_and_golden_value():
    assert zeta_closed_form(0, HALF).value == 0
    assert zeta_closed_form(-1, HALF).value.real == pytest.approx(ZETA_MINUS_ONE_HALF, rel=1e-12)


def test_direct_sum_needs_half_plane():
    with pytest.raises(DivergenceError):
        zeta_direct(0.5, HALF)
    with pytest.raises(DivergenceError):
        zeta_direct(0.25 + 3j, HALF)


def test_pole_guard():
    with pytest.raises(PoleError) as info:
        zeta_closed_form(0.5 + 1e-4, HALF)
    assert info.value.location == pytest.approx(0.5)
    zp = pole_location(1, 1, HALF)
    assert zp == pytest.approx(-0.5 + 2j * math.pi / math.log(0.5))
    assert nearest_pole(zp + 0.01, HALF) == pytest.approx(zp)


def test_unit_continuity_path():
    # at z = 1 the n-sum weight q^{n(1-z)} is 1, so blocks count multiplicities
    ev = zeta_direct(1, HALF, 40)
    assert rel(ev.value, zeta_closed_form(1, HALF).value) < 1e-8


@pytest.mark.parametrize("q0", ["3/10", "1/2", "4/5"])
@pytest.mark.parametrize("z", [0.75, 1, 2, 3, 0.75 + 4j, 2 - 4j, 3 + 4j])
def test_oracle_grid(q0, z):
    q0 = Fraction(q0)
    assert rel(zeta_direct(z, q0).value, zeta_closed_form(z, q0).value) < 1e-8


def test_tail_bound_is_valid():
    for z in (0.75, 1.0, 2.0, 2 + 4j):
        small = zeta_direct(z, HALF, 20)
        big = zeta_direct(z, HALF, 40)
        assert abs(big.value - small.value) <= small.tail_bound


@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("t", [-1, 0, 1])
def test_double_poles(k, t):
    diag = pole_diagnostic(k, t, HALF)
    assert diag.double_pole
    assert diag.relative_spread < 1e-3
    assert abs(diag.estimate) > 0


def test_regular_point():
    assert regular_point_diagnostic(0, HALF)["is_zero"]


def test_spectral_dimension():
    sweep = spectral_dimension_sweep(1, HALF, [Fraction(3, 5), Fraction(2, 5), HALF])
    conv = [r["convergent"] for r in sweep.rows]
    assert conv == [True, False, False]
    assert sweep.threshold == HALF
    assert sweep.rows[2]["limit_ratio"] == 1.0
    assert spectral_dimension_sweep(2, HALF, [HALF, Fraction(3, 2)]).threshold == 1


def test_psi_cross_check():
    a, b = psi_cross_check(12, HALF)
    assert rel(a, b) < 1e-10


@given(st.floats(0.6, 4), st.floats(-6, 6))
def test_conjugate_symmetry(x, y):
    z = complex(x, y)
    try:
        w = zeta_closed_form(z, HALF).value
        wc = zeta_closed_form(z.conjugate(), HALF).value
    except PoleError:
        return
    assert abs(wc - w.conjugate()) <= 1e-12 * max(1.0, abs(w))


@given(st.floats(0.7, 4), st.floats(-5, 5), st.sampled_from(["3/10", "1/2", "4/5"]))
def test_oracle_agreement_random(x, y, q0):
    z = complex(x, y)
    q0 = Fraction(q0)
    try:
        cf = zeta_closed_form(z, q0).value
    except PoleError:
        return
    assert rel(zeta_direct(z, q0).value, cf) < 1e-8


@given(st.fractions(Fraction(1, 20), Fraction(19, 20)), st.floats(0.7, 3))
def test_zeta_real_positive_on_real_axis(q0, x):
    ev = zeta_direct(x, q0)
    assert ev.value.imag == 0 and ev.value.real > 0
    assert cmath.isfinite(ev.value)
