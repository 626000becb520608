import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from efdyn.closedforms import ef_residual, pseudo_solution, sech_soliton
from efdyn.errors import DomainError
from efdyn.numerics import gauss_legendre
from efdyn.parametric import (curve_first, curve_lambda0, curve_second, elliptic_orbit,
                              elliptic_rhs, theta_first)


def test_theta_first_examples():
    assert theta_first(0.3, 0.3, 1.0, 0.5) == 0.0
    f = lambda t: 1 / math.sqrt(1 + 2 * t ** 3 / 3 + t * t / 4)  # noqa: E731
    assert theta_first(1.0, 0.0, 1.0, 0.5) == pytest.approx(gauss_legendre(f, 0, 1, 16), abs=1e-9)
    ref = mpmath.quad(lambda t: 1 / mpmath.sqrt(5 + 2 * mpmath.log(t) + t * t / 4), [1, 2])
    assert theta_first(2.0, 1.0, 5.0, -1.0) == pytest.approx(float(ref), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.5, 3), st.floats(0.5, 4), st.floats(0.05, 1.5), st.floats(0.05, 1.5))
def test_theta_first_matches_fixed_rule(lam, C2, lo, width):
    rad = lambda t: C2 + abs(t) ** (2 * (lam + 1)) / (lam + 1) + t * t / 4  # noqa: E731
    if lam == -1 or any(rad(lo + width * k / 64) <= 0.05 for k in range(65)):
        return
    oracle = gauss_legendre(lambda t: 1 / math.sqrt(rad(t)), lo, lo + width, 32)
    assert theta_first(lo + width, lo, C2, lam) == pytest.approx(oracle, abs=1e-9)


def test_theta_first_reports_bad_point():
    with pytest.raises(DomainError, match="tau="):
        theta_first(-2.0, 0.0, 0.0, 0.5)


def soliton_curve(count=200):
    return curve_first(0.5, 1.0, 0.0, 1.0, -1.0, (-0.375, -1e-3, count), tau0=-0.375)


def test_first_family_reproduces_soliton():
    c = soliton_curve()
    assert c.alpha == -1.0
    assert (c.equation.lam, c.equation.n) == (0.5, 2.0)
    for Y, q in zip(c.Y, c.q):
        assert q == pytest.approx(sech_soliton(Y), rel=1e-12)


def test_first_family_identity():
    c = soliton_curve()
    assert max(abs(r - 1) for r in c.identity_ratio()) < 1e-10
    c = curve_first(1.0, 0.7, 0.5, 2.0, 1.5, (0.1, 2.0, 40))
    assert max(abs(r - 1) for r in c.identity_ratio()) < 1e-10


@pytest.mark.parametrize("lam,C1,C2,a,b,rng", [
    (0.5, 1.0, 0.0, 1.0, -1.0, (-0.375, -1e-3, 120)),
    (1.0, 0.7, 0.5, 2.0, 1.5, (0.1, 2.0, 60)),
    (-0.5, 1.0, 1.0, 1.0, 2.0, (0.2, 3.0, 60)),
    (2.0, 1.0, 0.3, 0.5, 1.0, (-0.5, 0.8, 60)),
])
def test_first_family_reconstruction_residual(lam, C1, C2, a, b, rng):
    c = curve_first(lam, C1, C2, a, b, rng)
    lo, hi = c.Y_range()
    for k in range(1, 20):
        Y = lo + (hi - lo) * k / 20
        assert ef_residual(c.equation, c.q_of_Y, Y) < 1e-5 * max(1.0, abs(c.q_of_Y(Y)))


def test_second_family_examples():
    c = curve_second(2.0, 1.0, 1.0, 1.0, 1.0, "+", (0.0, 2.0, 50))
    assert c.alpha == 1.0
    assert c.theta(0.0) == 1.0
    assert c.equation.n == 1.0
    lo, hi = c.Y_range()
    for k in range(1, 20):
        Y = lo + (hi - lo) * k / 20
        assert ef_residual(c.equation, c.q_of_Y, Y) < 1e-5


def test_second_family_splits_at_poles():
    c = curve_second(2.0, 1.0, -1.0, 1.0, 1.0, "-", (-0.9, 0.9, 50))
    assert len(c.segments) == 2
    assert c.alpha == -1.0
    for seg in range(2):
        lo, hi = c.Y_range(seg)
        for k in range(1, 10):
            Y = lo + (hi - lo) * k / 10
            assert ef_residual(c.equation, lambda y: c.q_of_Y(y, seg), Y) < 1e-5 * max(1, abs(Y))


def test_second_family_noninteger_lambda():
    c = curve_second(1.5, 1.0, 0.5, 1.0, 1.0, "+", (0.0, 2.0, 40))
    assert c.alpha == pytest.approx(0.75)
    lo, hi = c.Y_range()
    for k in range(1, 10):
        Y = lo + (hi - lo) * k / 10
        assert ef_residual(c.equation, c.q_of_Y, Y) < 1e-5


def test_lambda0_examples():
    c = curve_lambda0(1.0, 2.0, 1.0, "-", (-1.0, 1.0, 5))
    assert c.q[2] == pytest.approx(1.0 / 2.0, abs=1e-15)
    assert curve_lambda0(1.0, 1.0, 2.0, "+", (0.0, 1.0, 3)).alpha == 8.0
    c = curve_lambda0(1.0, 50.0, 1.0, "-", (-2.0, 2.0, 21))
    for tau, Y, q in zip(c.tau, c.Y, c.q):
        assert q / Y == pytest.approx(math.exp(-tau * tau), rel=0.05)


def test_lambda0_matches_pseudo_oscillator():
    H, Y0 = 0.5, 0.2
    C1 = math.exp(-H / 2) / math.sqrt(2)
    b = 1 / math.sqrt(2)
    c = curve_lambda0(C1, C1 * Y0, b, "-", (-2.0, 2.0, 41))
    assert c.alpha == pytest.approx(-1.0, abs=1e-15)
    for Y, q in zip(c.Y, c.q):
        # invariant transformation s = 1/Y, w = q/Y
        assert q / Y == pytest.approx(pseudo_solution(H, Y0, 1, 1 / Y), rel=1e-12)
    for seg in range(len(c.segments)):
        lo, hi = c.Y_range(seg)
        for k in range(1, 10):
            Y = lo + (hi - lo) * k / 10
            assert ef_residual(c.equation, lambda y: c.q_of_Y(y, seg), Y) < 1e-5


def test_elliptic_rhs_examples():
    assert elliptic_rhs(0, 0) == 0
    # -3/8 is the simple root of the C2 = 0 cubic
    assert elliptic_rhs(-3 / 8, 0) == 0.0
    assert elliptic_rhs(-3 / 16, 0) == pytest.approx(9 / 2048, abs=1e-17)
    assert elliptic_rhs(1, 1) == pytest.approx(23 / 12)


def test_elliptic_orbit_degenerate_cases():
    assert elliptic_orbit(0.0) is None
    assert elliptic_orbit(1.0) is None
    assert elliptic_orbit(-0.01) is None


def direct_period(C2, r2):
    def turn(t, y):
        return y[1]
    turn.terminal, turn.direction = True, 1
    sol = solve_ivp(lambda t, y: [y[1], y[0] ** 2 + y[0] / 4], (0, 200), [r2, 0.0],
                    method="DOP853", rtol=1e-12, atol=1e-14, events=turn)
    return 2 * sol.t_events[0][0]


@pytest.mark.parametrize("C2", [-0.002, -0.0001, -0.005])
def test_elliptic_period_matches_direct_integration(C2):
    orb = elliptic_orbit(C2)
    r1, r2 = orb.turning_points
    assert elliptic_rhs(r1, C2) == pytest.approx(0, abs=1e-15)
    assert elliptic_rhs(r2, C2) == pytest.approx(0, abs=1e-15)
    assert orb.period == pytest.approx(direct_period(C2, r2), rel=1e-4)
    assert orb(0.0) == pytest.approx(r1)
    assert orb(orb.period / 2) == pytest.approx(r2)
    assert orb(orb.period * 3.0) == pytest.approx(r1)
