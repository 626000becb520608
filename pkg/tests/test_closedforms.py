import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from efdyn.closedforms import (DIODE, ERMAKOV, POSITIVE_POWER, PSEUDO_OSCILLATOR, Family,
                               aslanov_general, aslanov_particular, aslanov_residual,
                               closed_form, diode_partner, diode_slope, ef_residual,
                               ermakov_domain, ermakov_general, ermakov_partner, pinney,
                               pseudo_amplitude, pseudo_quadrature, pseudo_slope,
                               pseudo_solution, sech_soliton, sech_soliton_slope)
from efdyn.errors import DomainError
from efdyn.model import EfParams


def test_pseudo_solution_examples():
    assert pseudo_solution(0, 0, 1, 0) == pytest.approx(1.0, abs=1e-15)
    assert pseudo_solution(2, 0, 1, 0) == pytest.approx(math.e, rel=1e-15)
    A = pseudo_amplitude(0)
    assert 0 < pseudo_solution(0, 0, 1, A * (1 - 1e-12)) < 1e-5
    assert 0 < pseudo_solution(0, 0, 1, -A * (1 - 1e-12)) < 1e-5
    with pytest.raises(DomainError):
        pseudo_solution(0, 0, 1, A)


def test_pseudo_quadrature_examples():
    assert pseudo_quadrature(0, 1, 1) == 0.0
    ref = float(mpmath.sqrt(mpmath.pi / 2) * mpmath.erf(mpmath.sqrt(0.5)))
    assert pseudo_quadrature(0, math.exp(-0.5), "-") == pytest.approx(ref, abs=1e-14)
    assert pseudo_quadrature(0, math.exp(-0.5), "-") == pytest.approx(0.8556, abs=1e-4)
    with pytest.raises(DomainError):
        pseudo_quadrature(0, 2.0, 1)


@given(st.floats(-2, 2), st.floats(-3, 3), st.floats(-0.9, 0.9))
def test_pseudo_round_trip(H, Y0, frac):
    A = pseudo_amplitude(H)
    Y = Y0 + frac * A
    branch = 1 if Y < Y0 else -1
    q = pseudo_solution(H, Y0, branch, Y)
    back = Y0 + pseudo_quadrature(H, q, branch)
    assert pseudo_solution(H, Y0, branch, back) == pytest.approx(q, rel=1e-12)
    # recovering Y from q is ill-conditioned at the peak (q' = 0): error ~ A sqrt(eps)
    assert back == pytest.approx(Y, abs=1e-8 + 2 * A * 1.5e-8 * math.exp(-(frac * 30) ** 2))


@given(st.floats(-2, 2), st.floats(0.01, 0.9), st.sampled_from([-1, 1]))
def test_pseudo_round_trip_off_peak(H, frac, side):
    A = pseudo_amplitude(H)
    Y = side * frac * A
    branch = 1 if Y < 0 else -1
    assert pseudo_quadrature(H, pseudo_solution(H, 0, branch, Y), branch) == pytest.approx(Y, abs=1e-8)


@given(st.floats(-2, 2), st.floats(-0.95, 0.95))
def test_pseudo_conserves_hamiltonian(H, frac):
    Y = frac * pseudo_amplitude(H)
    q, qY = pseudo_solution(H, 0, 1, Y), pseudo_slope(H, 0, Y)
    assert qY * qY + math.log(q * q) == pytest.approx(H, abs=1e-12)


def test_pseudo_slope_matches_mpmath():
    f = lambda y: mpmath.sqrt(2 / mpmath.pi) * pseudo_amplitude(0.5) * mpmath.exp(  # noqa: E731
        -mpmath.erfinv(y / pseudo_amplitude(0.5)) ** 2)
    for Y in (-1.0, -0.2, 0.3, 1.1):
        assert pseudo_slope(0.5, 0, Y) == pytest.approx(float(mpmath.diff(f, Y)), rel=1e-12)


def test_ermakov_examples():
    assert ermakov_general(0, 0) == 1
    assert ermakov_general(0, 0.6) == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(DomainError):
        ermakov_general(1, 2)
    assert ermakov_partner(math.sqrt(2)) == pytest.approx(1, abs=1e-15)
    with pytest.raises(DomainError):
        ermakov_partner(1)
    assert ermakov_domain(0) == (-1, 1)
    assert ermakov_domain(2) == (-math.inf, 1 / 3)


@given(st.floats(-0.999, 0.999))
def test_pinney_is_c_zero(Y):
    assert ermakov_general(0, Y) == pinney(Y)


@given(st.floats(1.0001, 100))
def test_partner_duality(s):
    assert ermakov_partner(s) == pytest.approx(s * ermakov_general(0, 1 / s), abs=1e-12 * s)


def test_sech_examples():
    assert sech_soliton(1) == 0.375
    assert sech_soliton(1e-12) < 1e-11
    # roundoff floor of the 5-point stencil is ~1e-8 at h=2e-4; h=1e-3 is near optimal here
    assert ef_residual(POSITIVE_POWER, sech_soliton, 2.0, 1e-3) < 1e-8
    with pytest.raises(DomainError):
        sech_soliton(0)


@given(st.floats(1e-3, 1e3))
def test_sech_equals_rational_form(Y):
    assert sech_soliton(Y) == pytest.approx(1.5 * Y / (1 + math.sqrt(Y)) ** 2, rel=1e-13)
    ref = mpmath.diff(lambda y: 1.5 * y / (1 + mpmath.sqrt(y)) ** 2, Y)
    assert sech_soliton_slope(Y) == pytest.approx(float(ref), rel=1e-12)


def test_diode_examples():
    assert diode_partner(0) == pytest.approx(1.5 * 1.5 ** (1 / 3), rel=1e-15)
    assert diode_partner(0) == pytest.approx(1.717, abs=1e-4)
    with pytest.raises(DomainError):
        diode_partner(-1)


def test_diode_sign_is_plus_one():
    mpmath.mp.dps = 30
    w = lambda s: mpmath.mpf(1.5) * (mpmath.mpf(1.5) * (1 + s) ** 4) ** (mpmath.mpf(1) / 3)  # noqa: E731
    for s in (-0.5, 0.0, 1.0, 5.0):
        value = mpmath.sqrt(w(s)) * mpmath.diff(w, s, 2)
        assert float(value) == pytest.approx(1.0, abs=1e-20)
        assert diode_slope(s) == pytest.approx(float(mpmath.diff(w, s)), rel=1e-13)
    mpmath.mp.dps = 15


def test_aslanov_examples():
    assert aslanov_general(-1, -1.5, 1) == pytest.approx(0.36, abs=1e-15)
    assert aslanov_general(-1, -1.5, 4) == pytest.approx(0.5625, abs=1e-15)
    assert aslanov_residual(-1, -1.5, lambda x: aslanov_general(-1, -1.5, x), 2.0) < 1e-8
    assert aslanov_particular(0) == 0
    assert aslanov_particular(1) == pytest.approx(0.36)
    assert 1 - 1e-3 < aslanov_particular(1e8) < 1


@given(st.floats(1e-12, 1e4))
def test_aslanov_particular_is_member(x):
    assert aslanov_general(-1, -1.5, x) == pytest.approx(aslanov_particular(x), abs=1e-12)


@pytest.mark.parametrize("k,p", [(-1, -1.5), (1, -1.5), (2, 0.5), (-0.5, -2.5), (1.5, 1)])
def test_aslanov_general_residual(k, p):
    form = closed_form(Family.ASLANOV_GENERAL, k=k, p=p)
    mpmath.mp.dps = 30
    try:
        k_, p_ = mpmath.mpf(k), mpmath.mpf(p)
        y = lambda x: (1 + x ** (k_ * (p_ + 2)) / (k_ ** 2 * (p_ + 3))) ** (-1 / (p_ + 2))  # noqa: E731
        for x in form.interior(20, span=4):
            x = mpmath.mpf(x)
            res = (mpmath.diff(y, x, 2) + (k_ + 1) / x * mpmath.diff(y, x)
                   + x ** (2 * k_ + k_ * p_ - 2) * y(x) ** (2 * p_ + 5))
            assert abs(res) < 1e-20
            assert form(float(x)) == pytest.approx(float(y(x)), rel=1e-13)
            assert form.slope(float(x)) == pytest.approx(float(mpmath.diff(y, x)), rel=1e-11)
    finally:
        mpmath.mp.dps = 15
    for x in form.interior(20, margin=0.2, span=4):
        # stencil roundoff grows with |y|
        assert form.residual(x) < 1e-6 * max(1.0, abs(form(x)))


def test_residual_examples():
    assert ef_residual(ERMAKOV, pinney, 0.5, 1e-4) < 1e-6
    assert ef_residual(PSEUDO_OSCILLATOR, lambda y: pseudo_solution(0, 0, 1, y), 0.3, 1e-4) < 1e-6
    assert ef_residual(EfParams(2.0, 1.0, 3.0), lambda y: 0.0, 1.0) == 0.0


FAMILIES = [
    closed_form("pseudo_erf", H=-2), closed_form("pseudo_erf", H=0), closed_form("pseudo_erf", H=2),
    closed_form("pseudo_erf", H=1, Y0=0.7),
    closed_form("ermakov_general", C=0), closed_form("ermakov_general", C=1),
    closed_form("ermakov_general", C=2), closed_form("ermakov_general", C=-3),
    closed_form("pinney"), closed_form("ermakov_partner"), closed_form("sech_soliton"),
    closed_form("diode_partner"), closed_form("aslanov_particular"),
]


@pytest.mark.parametrize("form", FAMILIES, ids=lambda f: f"{f.family.value}{f.params}")
def test_family_residuals(form):
    for x in form.interior(50):
        assert form.contains(x)
        assert form.residual(x) < 1e-6


def test_family_equations():
    assert closed_form("diode_partner").equation == DIODE
    assert DIODE.alpha == 1.0
    assert closed_form("aslanov_particular").equation == POSITIVE_POWER
    assert closed_form("aslanov_general").equation is None
    with pytest.raises(DomainError):
        closed_form("aslanov_general", k=1, p=-2)
