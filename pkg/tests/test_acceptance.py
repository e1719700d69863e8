"""Acceptance criteria 1-13, at their stated tolerances.

A summary line per criterion is printed at the end of the session (see
conftest.py).  Criterion 11 does not hold at the stated truncations and is
kept as a strict expected failure.
"""

import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from qsu2 import hochschild as hs
from qsu2.coordinate_algebra import AlgebraElement, generators, haar_state, monomials_of_degree, monomials_up_to
from qsu2.dirac_spectral import (
    DoubledSpace,
    dirac_delta_commutator,
    dirac_squared_identity,
    lipschitz_sup,
    multiplicities,
    projection,
    psi_trace,
    resolvent_trace_partial,
    verify_twisted_commutator,
)
from qsu2.gns_rep import build_truncation, calibrate_gauge, gauge_mismatch, gram_leading_minors, verify_ef_fe
from qsu2.left_action import LeftActionEngine, sigma_L
from qsu2.scalars import EXACT, HalfInteger
from qsu2.suites import RunConfig, suite_algebra, suite_hochschild
from qsu2.zeta import (
    pole_diagnostic,
    pole_location,
    regular_point_diagnostic,
    spectral_dimension_sweep,
    zeta_closed_form,
    zeta_direct,
)

HALF = Fraction(1, 2)
g = generators()


def failures(reports):
    return [r.as_dict() for r in reports if not r.passed]


@pytest.mark.criterion(1, "exact algebra suite (associativity, involutions, Casimir) under 1 min")
def test_criterion_01_algebra():
    t0 = time.perf_counter()
    reports = suite_algebra(RunConfig())
    elapsed = time.perf_counter() - t0
    assert not failures(reports)
    names = {r.check: r for r in reports}
    assert names["algebra.A.associativity"].checked == 500
    assert names["algebra.U.associativity"].checked == 500
    for key in ("algebra.casimir_presentations", "algebra.casimir_central", "algebra.A.star_involutive",
                "algebra.U.star_antimultiplicative"):
        assert names[key].passed
    assert elapsed < 60


@pytest.mark.criterion(2, "D^2 = c_q Delta^2 exactly over Q(v) for N <= 6")
def test_criterion_02_dirac_square():
    for N in range(7):
        rep = dirac_squared_identity(DoubledSpace(build_truncation(N)))
        assert rep.passed, rep.as_dict()


@pytest.mark.criterion(3, "[D, Delta] = 0 exactly for N <= 6")
def test_criterion_03_dirac_delta():
    for N in range(7):
        rep = dirac_delta_commutator(DoubledSpace(build_truncation(N)))
        assert rep.passed, rep.as_dict()


@pytest.mark.criterion(4, "twisted commutator matches the symbolic 2x2 form on interior rows at N = 6")
def test_criterion_04_twisted_commutator():
    space = DoubledSpace(build_truncation(6))
    xs = [g[n] for n in "abcd"] + [AlgebraElement.monomial(m) for m in monomials_of_degree(2)]
    for x in xs:
        rep = verify_twisted_commutator(x, space, interior=True)
        assert rep.passed, rep.as_dict()


@pytest.mark.criterion(5, "single q-power gauge matches E entries to 1e-9 for l <= 3; EF/FE exact")
def test_criterion_05_gauge():
    space = build_truncation(6)
    rho = calibrate_gauge(space, HALF)
    assert rho.is_monomial()
    assert abs(gauge_mismatch(space, HALF, LeftActionEngine(rho), l_max=3) - 1) < 1e-9
    assert verify_ef_fe(space).passed


@pytest.mark.criterion(6, "Gram positivity N <= 6 at q = 1/4, 1/2, 3/4; Haar invariance and twisted trace to degree 4")
def test_criterion_06_haar():
    for q0 in (Fraction(1, 4), HALF, Fraction(3, 4)):
        minors = gram_leading_minors(6, q0)
        assert minors and all(m > 0 for m in minors)
    sl = sigma_L()
    monos = [AlgebraElement.monomial(m) for m in monomials_up_to(4)]
    assert all(haar_state(sl(x)) == haar_state(x) for x in monos)
    h = hs.haar_trace()
    assert h.twisted_trace_report(4).passed


@pytest.mark.criterion(7, "Psi block bound for l <= 3 (exact); resolvent partial sums under the majorant (1e-12)")
def test_criterion_07_trace_bounds():
    space = DoubledSpace(build_truncation(6))
    for (l2, n2) in multiplicities(space):
        psi = psi_trace(projection(space, HalfInteger(n2), HalfInteger(l2)), space)
        bound = EXACT.v_pow(n2) * EXACT(2 * (l2 + 1))
        diff = bound - psi
        # bound - Psi is a Laurent polynomial in v with a nonnegative value on (0, 1)
        assert diff.is_zero() or all(EXACT.to_numeric(diff, Fraction(k, 10)) >= 0 for k in range(1, 10))
        assert EXACT.to_numeric(psi, HALF) <= EXACT.to_numeric(bound, HALF)
    for L2 in range(61):
        r = resolvent_trace_partial(Fraction(L2, 2), HALF)
        assert r.value - r.majorant <= 1e-12


@pytest.mark.criterion(8, "zeta closed form vs direct sum to 1e-8 on the grid; zeta(0) = 0; conjugate symmetry 1e-12")
def test_criterion_08_zeta():
    t0 = time.perf_counter()
    for q0 in (Fraction(3, 10), HALF, Fraction(4, 5)):
        for x in (0.75, 1.0, 2.0, 3.0):
            for y in (0.0, 4.0, -4.0):
                z = complex(x, y)
                a = zeta_direct(z, q0).value
                b = zeta_closed_form(z, q0).value
                assert abs(a - b) / abs(b) < 1e-8, (z, q0)
                bc = zeta_closed_form(z.conjugate(), q0).value
                assert abs(bc - b.conjugate()) <= 1e-12 * max(1.0, abs(b))
        assert zeta_closed_form(0, q0).value == 0
    assert time.perf_counter() - t0 < 60


@pytest.mark.criterion(9, "double poles at 1/2 and 1/2 + 2 pi i/log q (Richardson 1e-3); regular point gives 0")
def test_criterion_09_poles():
    for t in (0, 1):
        diag = pole_diagnostic(0, t, HALF)
        assert diag.location == pytest.approx(0.5 + 2j * math.pi * t / math.log(0.5))
        assert diag.location == pole_location(0, t, HALF)
        assert diag.relative_spread < 1e-3
        assert diag.double_pole and abs(diag.estimate) > 0
    assert regular_point_diagnostic(0, HALF)["is_zero"]


@pytest.mark.criterion(10, "spectral dimension threshold s/2 for s = 1, 2")
def test_criterion_10_dimension():
    for s in (1, 2):
        half = Fraction(s, 2)
        grid = [half - Fraction(1, 10), half, half + Fraction(1, 10)]
        sweep = spectral_dimension_sweep(s, HALF, grid)
        assert sweep.threshold == half
        assert [r["convergent"] for r in sweep.rows] == [False, False, True]


@pytest.mark.criterion(11, "Lipschitz sup of [|D|, x]_sigma for x = a, c stable to 1e-6 between N = 8 and N = 12")
@pytest.mark.xfail(strict=True, reason="the sup still grows by about 2e-6 (a) and 4e-6 (c) from N = 8 to 12")
def test_criterion_11_lipschitz():
    for name in ("a", "c"):
        s8 = lipschitz_sup(g[name], HALF, 8)
        s12 = lipschitz_sup(g[name], HALF, 12)
        assert math.isfinite(s12["raising_C1"])
        assert abs(s12["raising_C1"] - s8["raising_C1"]) < 1e-6
        assert abs(s12["sup"] - s8["sup"]) < 1e-6, (name, s8["sup"], s12["sup"])


@pytest.mark.criterion(12, "Hochschild certificates for h and three twists, exact, under 5 min")
def test_criterion_12_hochschild():
    t0 = time.perf_counter()
    reports = suite_hochschild(RunConfig(), k2=False)
    elapsed = time.perf_counter() - t0
    assert not failures(reports)
    names = [r.check for r in reports]
    assert sum(n.startswith("b_sigma(phi_s) = 0") for n in names) == 6
    assert sum(n.startswith("b_sigma(b_sigma(psi))") for n in names) == 2
    certs = [r for r in reports if r.check == "hochschild.triviality_certificate"]
    assert len(certs) == 4
    for cert in certs:
        checks = cert.details["checks"]
        assert len(checks) == 8
        # six transgressions, the decomposition, and b_sigma(psi) = phi
        assert all(c["status"] == "pass" and c["tuples_checked"] == 14**4 + 100 for c in checks)
    assert elapsed < 300


@pytest.mark.criterion(13, "two runs of 'verify all' with the same config give identical reports")
def test_criterion_13_determinism(tmp_path):
    outs = [tmp_path / "run1.json", tmp_path / "run2.json"]
    env = dict(os.environ, PYTHONHASHSEED="random")
    procs = [subprocess.Popen([sys.executable, "-m", "qsu2", "verify", "all", "--out", str(p)],
                              stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL, env=env) for p in outs]
    codes = [p.wait(timeout=1200) for p in procs]
    assert codes == [0, 0]
    assert outs[0].read_bytes() == outs[1].read_bytes()
