"""Acceptance checks. Each test prints one PASS/FAIL line for its criterion."""

import math
import random
import time

import pytest
from scipy.integrate import solve_ivp as scipy_solve_ivp

from efdyn import (EfParams, Family, closed_form, curve_first, detect_period, ef_residual,
                   elliptic_orbit, ermakov_invariant, fixed_points, integrate_physical,
                   invariant_drift, invariant_first, invariant_transform, pseudo_hamiltonian,
                   table1)
from efdyn.cli import main
from efdyn.closedforms import ermakov_partner, pinney, sech_soliton
from efdyn.model import Kind, PointIndex

PSEUDO = EfParams(-1.0, -2.0, -1.0)
ERMAKOV = EfParams(-1.0, -2.0, -3.0)
POSITIVE = EfParams(-1.0, 0.5, 2.0)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_c01_table1_reproduction(report):
    rng = random.Random(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        alpha = 0.0
        while alpha == 0.0:
            alpha = rng.uniform(-5, 5)
        lam, n = rng.uniform(-5, 5), rng.uniform(-5, 5)
        if n == 1.0:
            continue
        p = EfParams(alpha, lam, n)
        closed = table1(p)
        points = fixed_points(p)
        assert len(points) == 4
        for e in points:
            for got, want in zip((e.delta1, e.delta2, e.discriminant), closed[e.index]):
                worst = max(worst, abs(got - want) / abs(want) if want else abs(got))
    elapsed = time.perf_counter() - start
    report(1, worst < 1e-10 and elapsed < 1.0,
           f"max rel dev {worst:.2e} (< 1e-10), {elapsed:.3f} s (< 1 s)")


def test_c02_example_triples(report):
    cases = [((-1, -2, -3), (-0.5, -0.5), (0.0, -1.0), Kind.SADDLE),
             ((-1, -2, -1), (-1.0, 0.0), (1.0, 0.0), Kind.DEGENERATE_NODE),
             ((-1, 0.5, 2), (-0.5, -0.5), (0.0, 0.25), Kind.CENTER)]
    bad = []
    for triple, loc, deltas, kind in cases:
        p3 = fixed_points(EfParams(*triple)).get("P3")
        if ((p3.u, p3.v) != loc or (p3.delta1, p3.delta2) != deltas or p3.kind is not kind):
            bad.append(triple)
    p1 = fixed_points(EfParams(-1, -2, -1)).get("P1")
    coincident = PointIndex.P1 in fixed_points(EfParams(-1, -2, -1)).get("P3").coincident_with
    ok = not bad and coincident and (p1.u, p1.v) == (-1.0, 0.0)
    report(2, ok, f"exact match for all three triples{'' if ok else f'; mismatched {bad}'}")


def test_c03_center_condition(report):
    rng = random.Random(7)
    worst = 0.0
    off_line_zero = 0
    for _ in range(500):
        lam = 0.0
        while abs(lam) < 1e-6:
            lam = rng.uniform(-5, 5)
        p3 = fixed_points(EfParams(-1.0, lam, 2 * lam + 1)).get("P3")
        worst = max(worst, abs(p3.delta1), abs(p3.delta2 - lam / 2))
        n = 2 * lam + 1 + rng.choice((-1, 1)) * rng.uniform(1e-3, 2)
        if n != 1.0 and fixed_points(EfParams(-1.0, lam, n)).get("P3").delta1 == 0.0:
            off_line_zero += 1
    report(3, worst < 1e-12 and off_line_zero == 0,
           f"max dev {worst:.2e} (< 1e-12); off-line zero traces {off_line_zero}")


def test_c04_closed_form_residuals(report):
    forms = ([closed_form(Family.PSEUDO_ERF, H=H) for H in (-2.0, 0.0, 2.0)]
             + [closed_form(Family.ERMAKOV_GENERAL, C=C) for C in (0.0, 1.0, 2.0)]
             + [closed_form(Family.SECH_SOLITON), closed_form(Family.ASLANOV_PARTICULAR)])
    start = time.perf_counter()
    worst = max(abs(cf.residual(x)) for cf in forms for x in cf.interior(50))
    elapsed = time.perf_counter() - start
    report(4, worst < 1e-6 and elapsed < 1.0,
           f"max residual {worst:.2e} over {len(forms)} forms (< 1e-6), {elapsed:.3f} s (< 1 s)")


def test_c05_invariant_conservation(report):
    cases = [("pseudo_hamiltonian", PSEUDO, (0.0, 2.0, 0.0, 1.5),
              lambda s: pseudo_hamiltonian(s)),
             ("invariant_first ermakov", ERMAKOV, (0.0, 2.0, 0.0, 1.5),
              lambda s: invariant_first(ERMAKOV, s)),
             ("invariant_first lambda=1/2", POSITIVE, (1.0, 0.4, 0.1, 2.5),
              lambda s: invariant_first(POSITIVE, s)),
             ("ermakov_invariant", ERMAKOV, (0.0, 1.5, 0.2, 1.2),
              lambda s: ermakov_invariant(s))]
    details, ok = [], True
    for name, p, (Y0, q0, qY0, Y_max), fn in cases:
        tr = integrate_physical(p, Y0, q0, qY0, Y_max, "rkf45", tol=1e-10)
        span = tr.times[-1] - tr.times[0]
        d = invariant_drift(fn(s) for s in tr.physical_states())
        ok &= tr.completed and span >= 1.0 and d.rel_dev < 1e-6
        details.append(f"{name} {d.rel_dev:.1e}")
    report(5, ok, "rel drift " + ", ".join(details) + " (< 1e-6)")


def test_c06_periodicity_certificate(report):
    start = time.perf_counter()
    center = detect_period(POSITIVE, -0.5 + 0.05, -0.5, 1e-6, 200)
    false_positives = []
    for name, p in (("pseudo", PSEUDO), ("ermakov", ERMAKOV)):
        p3 = fixed_points(p).get("P3")
        for k in range(20):
            phi = 2 * math.pi * k / 20
            u0, v0 = p3.u + 0.05 * math.cos(phi), p3.v + 0.05 * math.sin(phi)
            if detect_period(p, u0, v0, 1e-6, 200).periodic:
                false_positives.append((name, k))
    elapsed = time.perf_counter() - start
    ok = (center.periodic and center.closure_error < 1e-6 and not false_positives
          and elapsed < 10.0)
    report(6, ok, f"center closure {center.closure_error:.1e}, period {center.period:.6f}; "
                  f"false periodic {len(false_positives)}/40; {elapsed:.2f} s (< 10 s)")


def test_c07_duality(report):
    ss = [1.0 + 9.0 * k / 400 for k in range(1, 401)]
    dual = max(abs(ermakov_partner(s) - s * pinney(1.0 / s)) for s in ss)

    def w(s):
        return invariant_transform(1.0 / s, sech_soliton(1.0 / s))[1]

    partner = EfParams(POSITIVE.alpha, POSITIVE.n - POSITIVE.lam - 1.0, POSITIVE.n)
    grid = [0.05 + 9.95 * k / 49 for k in range(50)]
    resid = max(abs(ef_residual(partner, w, s)) for s in grid)
    report(7, dual <= 1e-12 and resid < 1e-5,
           f"partner vs s*pinney(1/s) {dual:.1e} (<= 1e-12); transformed sech residual "
           f"{resid:.1e} (< 1e-5)")


def _scipy_period(C2, r2):
    def turn(t, y):
        return y[1]
    turn.terminal, turn.direction = True, 1
    # from the upper turning point tau decreases; the next minimum is half a period away
    sol = scipy_solve_ivp(lambda t, y: (y[1], y[0] * y[0] + y[0] / 4), (0, 200), (r2, 0.0),
                          method="DOP853", rtol=1e-12, atol=1e-14, events=turn)
    return 2 * sol.t_events[0][0]


def test_c08_parametric_identity(report):
    c = curve_first(0.5, 1.0, 0.0, 1.0, -1.0, (-0.375, -1e-3, 200), tau0=-0.375)
    c2 = curve_first(1.0, 0.7, 0.5, 2.0, 1.5, (0.1, 2.0, 200))
    ident = max(abs(r - 1.0) for cv in (c, c2) for r in cv.identity_ratio())
    none_case = elliptic_orbit(0.0) is None
    C2 = -0.002
    orb = elliptic_orbit(C2)
    r1, r2 = orb.turning_points
    system = detect_period(POSITIVE, -0.5, 2.0 * r2, 1e-9, 200, rk_tol=1e-12)
    oracle = _scipy_period(C2, r2)
    rel = max(abs(orb.period - system.period), abs(orb.period - oracle)) / orb.period
    ok = ident <= 1e-10 and none_case and system.periodic and rel < 1e-3
    report(8, ok, f"identity dev {ident:.1e} (<= 1e-10); C2=0 gives none: {none_case}; "
                  f"period {orb.period:.10f} vs direct rel {rel:.1e} (< 1e-3)")


def test_c09_rk4_convergence(report):
    errs = []
    for dt in (0.1, 0.05, 0.025, 0.0125):
        tr = integrate_physical(ERMAKOV, 0.0, 1.0, 0.0, 0.5, "rk4", dt=dt)
        errs.append(abs(tr.states[-1][0] - pinney(0.5)))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    report(9, all(8 <= r <= 32 for r in ratios),
           "error ratios " + ", ".join(f"{r:.2f}" for r in ratios) + " (in [8, 32])")


def test_c10_sweep_determinism(report, tmp_path):
    outputs, times = [], []
    for jobs in ("1", "8"):
        path = tmp_path / f"sweep{jobs}.csv"
        start = time.perf_counter()
        code = main(["sweep", "--alpha", "-1", "--lambda", "-2:2:41", "--n", "-3:5:41",
                     "--jobs", jobs, "--out", str(path)])
        times.append(time.perf_counter() - start)
        assert code == 0
        outputs.append(path.read_bytes())
    same = outputs[0] == outputs[1]
    rows = outputs[0].count(b"\n") - 1
    report(10, same and rows == 41 * 41 and max(times) < 5.0,
           f"byte-identical: {same}, {rows} rows, jobs 1 {times[0]:.2f} s, "
           f"jobs 8 {times[1]:.2f} s (< 5 s)")
