"""Numerical integration of the physical equation and of the autonomous system.

Both problems are planar, so the integrators work on plain ``(float, float)``
tuples. Fixed-step Euler and RK4 are provided for comparison with simple
schemes; the default is an embedded Runge-Kutta-Fehlberg 4(5) pair with
mixed absolute/relative error control.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DomainError, IntegrationError
from .invariants import PhysicalState
from .model import EfParams, SystemState, fixed_points, PointIndex, vector_field
from .numerics import real_power

BLOWUP = 1e12
SINGULAR_Q = 1e-10
DEFAULT_RK_TOL = 1e-10

Vec = tuple[float, float]
Rhs = Callable[[float, Vec], Vec]


class Coords(str, enum.Enum):
    SYSTEM = "system"
    PHYSICAL = "physical"


class Method(str, enum.Enum):
    EULER = "euler"
    RK4 = "rk4"
    RKF45 = "rkf45"


@dataclass
class Trajectory:
    """Sampled solution of a planar ODE.

    For ``coords == SYSTEM`` the times are ``t`` and states ``(u, v)``; for
    ``PHYSICAL`` the times are ``Y`` and states ``(q, qY)``. ``stop_reason``
    is ``"completed"`` when the requested end was reached.
    """

    coords: Coords
    method: Method
    times: list[float] = field(default_factory=list)
    states: list[Vec] = field(default_factory=list)
    dt: Optional[float] = None
    tol: Optional[float] = None
    accepted: int = 0
    rejected: int = 0
    stop_reason: str = "completed"

    def __len__(self):
        return len(self.times)

    @property
    def completed(self) -> bool:
        return self.stop_reason == "completed"

    def system_states(self) -> list[SystemState]:
        if self.coords is not Coords.SYSTEM:
            raise ValueError("not a system trajectory")
        return [SystemState(u, v, t) for t, (u, v) in zip(self.times, self.states)]

    def physical_states(self) -> list[PhysicalState]:
        if self.coords is not Coords.PHYSICAL:
            raise ValueError("not a physical trajectory")
        return [PhysicalState(Y, q, qY) for Y, (q, qY) in zip(self.times, self.states)]


# ---------------------------------------------------------------------------
# single steps

def _euler_step(f: Rhs, t: float, y: Vec, h: float) -> Vec:
    k = f(t, y)
    return y[0] + h * k[0], y[1] + h * k[1]


def _rk4_step(f: Rhs, t: float, y: Vec, h: float) -> Vec:
    y0, y1 = y
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, (y0 + 0.5 * h * k1[0], y1 + 0.5 * h * k1[1]))
    k3 = f(t + 0.5 * h, (y0 + 0.5 * h * k2[0], y1 + 0.5 * h * k2[1]))
    k4 = f(t + h, (y0 + h * k3[0], y1 + h * k3[1]))
    return (y0 + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y1 + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]))


# Fehlberg tableau
_C = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
_B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def _rkf45_step(f: Rhs, t: float, y: Vec, h: float) -> tuple[Vec, Vec]:
    """Fifth-order update and the embedded error estimate."""
    ks: list[Vec] = []
    for c, row in zip(_C, _A):
        s0 = y[0] + h * sum(a * k[0] for a, k in zip(row, ks))
        s1 = y[1] + h * sum(a * k[1] for a, k in zip(row, ks))
        ks.append(f(t + c * h, (s0, s1)))
    y5 = (y[0] + h * sum(b * k[0] for b, k in zip(_B5, ks)),
          y[1] + h * sum(b * k[1] for b, k in zip(_B5, ks)))
    err = (h * sum(e * k[0] for e, k in zip(_E, ks)),
           h * sum(e * k[1] for e, k in zip(_E, ks)))
    return y5, err


# ---------------------------------------------------------------------------
# drivers

def _check_state(y: Vec, stop: Optional[Callable[[float, Vec], Optional[str]]], t: float):
    if not (math.isfinite(y[0]) and math.isfinite(y[1])):
        return "non-finite"
    if abs(y[0]) > BLOWUP or abs(y[1]) > BLOWUP:
        return "blow-up"
    if stop is not None:
        return stop(t, y)
    return None


def _safe(f: Rhs, stop_on_domain: bool) -> Rhs:
    if not stop_on_domain:
        return f

    def g(t, y):
        try:
            return f(t, y)
        except (DomainError, OverflowError, ZeroDivisionError) as exc:
            raise _Halt("domain") from exc
    return g


class _Halt(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


def solve_ivp(f: Rhs, t0: float, y0: Vec, t_end: float, method: Method | str = Method.RKF45,
              dt: Optional[float] = None, tol: Optional[float] = None, *,
              coords: Coords = Coords.SYSTEM,
              stop: Optional[Callable[[float, Vec], Optional[str]]] = None,
              h0: Optional[float] = None) -> Trajectory:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end > t0``.

    Fixed-step methods need ``dt``; RKF45 uses ``tol`` (default 1e-10) as
    a mixed tolerance, the local error in each component being held below
    ``tol * max(1, |y_i|)``. Integration stops early at the first
    non-finite or blown-up state, at a domain error of ``f``, or when
    ``stop(t, y)`` returns a reason string. Step-size underflow raises
    :class:`IntegrationError` carrying the partial trajectory.
    """
    method = Method(method)
    if not t_end > t0:
        raise ValueError("t_end must exceed the start time")
    traj = Trajectory(coords, method, [t0], [tuple(y0)])
    reason = _check_state(y0, stop, t0)
    if reason is not None:
        traj.stop_reason = reason
        return traj
    g = _safe(f, True)
    try:
        if method is Method.RKF45:
            tol = DEFAULT_RK_TOL if tol is None else tol
            if not 1e-14 <= tol <= 1e-2:
                raise ValueError("tol must lie in [1e-14, 1e-2]")
            traj.tol = tol
            _adaptive(g, traj, t_end, tol, stop, h0)
        else:
            if dt is None or not dt > 0.0:
                raise ValueError("fixed-step methods need dt > 0")
            traj.dt = dt
            _fixed(g, traj, t_end, dt, _euler_step if method is Method.EULER else _rk4_step, stop)
    except _Halt as halt:
        traj.stop_reason = halt.reason
    return traj


def _fixed(f, traj, t_end, dt, step, stop):
    t0 = traj.times[0]
    y = traj.states[0]
    steps = max(1, math.ceil((t_end - t0) / dt - 1e-9))
    t = t0
    for k in range(1, steps + 1):
        t_next = t_end if k == steps else t0 + k * dt
        y = step(f, t, y, t_next - t)
        t = t_next
        traj.accepted += 1
        reason = _check_state(y, stop, t)
        if reason in ("non-finite",):
            traj.stop_reason = reason
            return
        traj.times.append(t)
        traj.states.append(y)
        if reason is not None:
            traj.stop_reason = reason
            return


def _adaptive(f, traj, t_end, tol, stop, h0):
    t = traj.times[0]
    y = traj.states[0]
    span = t_end - t
    h = min(span, h0 if h0 is not None else 1e-2 * max(1.0, abs(t)))
    while t < t_end:
        if t_end - t < h:
            h = t_end - t
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t={t!r}", traj)
        try:
            y_new, err = _rkf45_step(f, t, y, h)
        except _Halt:
            # a stage left the domain: retry smaller before giving up
            if h < 1e-12 * max(1.0, abs(t)):
                raise
            h *= 0.25
            traj.rejected += 1
            continue
        ratio = max(abs(err[0]) / max(1.0, abs(y[0]), abs(y_new[0])),
                    abs(err[1]) / max(1.0, abs(y[1]), abs(y_new[1]))) / tol
        if not math.isfinite(ratio):
            h *= 0.25
            traj.rejected += 1
            continue
        if ratio <= 1.0:
            t = t_end if t_end - t - h <= 1e-15 * max(1.0, abs(t_end)) else t + h
            y = y_new
            traj.accepted += 1
            reason = _check_state(y, stop, t)
            if reason == "non-finite":
                traj.stop_reason = reason
                return
            traj.times.append(t)
            traj.states.append(y)
            if reason is not None:
                traj.stop_reason = reason
                return
            grow = 5.0 if ratio == 0.0 else min(5.0, 0.9 * ratio ** -0.2)
            h *= max(1.0, grow)
        else:
            traj.rejected += 1
            h *= max(0.1, 0.9 * ratio ** -0.25)


# ---------------------------------------------------------------------------
# public integrators

def system_rhs(p: EfParams) -> Rhs:
    a, lam1, n = p.alpha, 1.0 + p.lam, p.n

    def f(t, y):
        u, v = y
        return -u * (1.0 + u - a * v), v * (lam1 + n * u - a * v)
    return f


def integrate_system(p: EfParams, u0: float, v0: float, t_max: float,
                     method: Method | str = Method.RKF45, dt: Optional[float] = None,
                     tol: Optional[float] = None, t0: float = 0.0) -> Trajectory:
    """Orbit of ``(u0, v0)`` under the autonomous system up to time ``t_max``.

    Examples
    --------
    >>> p = EfParams(-1.0, 0.5, 2.0)
    >>> tr = integrate_system(p, -0.5, -0.5, 1.0)
    >>> tr.states[-1]
    (-0.5, -0.5)
    """
    if not t_max > 0.0:
        raise ValueError("t_max must be positive")
    return solve_ivp(system_rhs(p), t0, (u0, v0), t0 + t_max, method, dt, tol)


def physical_rhs(p: EfParams) -> Rhs:
    a, e, n = p.alpha, -p.lam - 2.0, p.n

    def f(Y, y):
        q, qY = y
        return qY, a * real_power(Y, e) * real_power(q, n)
    return f


def integrate_physical(p: EfParams, Y0: float, q0: float, qY0: float, Y_max: float,
                       method: Method | str = Method.RKF45, dt: Optional[float] = None,
                       tol: Optional[float] = None) -> Trajectory:
    """Solution of ``q'' = alpha Y**(-lambda-2) q**n`` from ``Y0`` to ``Y_max``.

    For negative ``n`` the run stops with reason ``"singularity"`` once
    ``|q| < 1e-10``. A right-hand side that stops being real (for instance
    a fractional power of a negative ``q``) ends the run with ``"domain"``.
    """
    if not Y_max > Y0:
        raise ValueError("Y_max must exceed Y0")
    if not float(p.lam).is_integer() and Y0 <= 0.0:
        raise DomainError("Y0 must be positive for non-integer lambda")
    stop = None
    if p.n < 0.0:
        def stop(Y, y):
            return "singularity" if abs(y[0]) < SINGULAR_Q else None
    return solve_ivp(physical_rhs(p), Y0, (q0, qY0), Y_max, method, dt, tol,
                     coords=Coords.PHYSICAL, stop=stop)


# ---------------------------------------------------------------------------
# coordinate maps

def kamke_map(Y: float, q: float, qY: float) -> tuple[float, float, float]:
    """``(xi, eta, eta')`` with ``xi = 1/Y``, ``eta = q`` and ``eta' = -Y**2 qY``."""
    if Y == 0.0:
        raise DomainError("kamke_map requires Y != 0")
    return 1.0 / Y, q, -Y * Y * qY


def kamke_inverse(xi: float, eta: float, eta_prime: float) -> tuple[float, float, float]:
    if xi == 0.0:
        raise DomainError("kamke_inverse requires xi != 0")
    return 1.0 / xi, eta, -xi * xi * eta_prime


def invariant_transform(Y: float, q: float) -> tuple[float, float]:
    """``(s, w) = (1/Y, q/Y)``. Applying it twice gives back ``(Y, q)``."""
    if Y == 0.0:
        raise DomainError("invariant_transform requires Y != 0")
    return 1.0 / Y, q / Y


def js_coordinates(p: EfParams, xi: float, eta: float, eta_prime: float) -> SystemState:
    """System point ``u = xi eta'/eta``, ``v = xi**(lambda-1) eta**n / eta'``, ``t = ln xi``."""
    if eta == 0.0 or eta_prime == 0.0:
        raise DomainError("js_coordinates needs eta != 0 and eta' != 0")
    if not xi > 0.0:
        raise DomainError("js_coordinates needs xi > 0")
    u = xi * eta_prime / eta
    v = real_power(xi, p.lam - 1.0) * real_power(eta, p.n) / eta_prime
    return SystemState(u, v, math.log(xi))


def physical_to_system(p: EfParams, s: PhysicalState) -> SystemState:
    return js_coordinates(p, *kamke_map(s.Y, s.q, s.qY))


# ---------------------------------------------------------------------------
# closed-orbit detection

@dataclass(frozen=True)
class PeriodReport:
    """Outcome of :func:`detect_period`.

    ``period`` and ``closure_error`` refer to the first return to the
    section in the starting direction and are NaN when there was none.
    ``reason`` is ``"closed"``, ``"not closed"``, ``"escape"``,
    ``"inconclusive"``, ``"equilibrium"`` or ``"integration failure"``.
    """

    periodic: bool
    period: float
    closure_error: float
    crossings: int
    reason: str


def _section(p: EfParams, u0: float, v0: float):
    """Section function, crossing direction and side filter for a start point."""
    du, dv = vector_field(p, SystemState(u0, v0))
    p3 = None
    if p.n != 1.0:
        p3 = fixed_points(p).get(PointIndex.P3)
    # near-tangent flow makes the v = v0 section ill-conditioned; switch to u = u0
    if abs(dv) >= 1e-6 or abs(dv) >= abs(du):
        comp, level, other, direction = 1, v0, 0, math.copysign(1.0, dv)
        ref = None if p3 is None else p3.u
    else:
        comp, level, other, direction = 0, u0, 1, math.copysign(1.0, du)
        ref = None if p3 is None else p3.v
    side = 0.0
    if ref is not None:
        start_other = (u0, v0)[other]
        if start_other != ref:
            side = math.copysign(1.0, start_other - ref)
    return comp, level, other, direction, ref, side


def detect_period(p: EfParams, u0: float, v0: float, tol: float = 1e-6,
                  t_max: float = 200.0, rk_tol: float = 1e-12) -> PeriodReport:
    """Look for a closed orbit through ``(u0, v0)``.

    The orbit is followed with RKF45 and its crossings of the section
    through the start point (the half-line on the start's side of P3) are
    located by bisection to 1e-12 in time. The first crossing in the
    starting direction decides: the orbit is periodic when it lands within
    Euclidean distance ``tol`` of the start.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if not t_max > 0.0:
        raise ValueError("t_max must be positive")
    f = system_rhs(p)
    du, dv = f(0.0, (u0, v0))
    if math.hypot(du, dv) < 1e-14:
        return PeriodReport(False, math.nan, math.nan, 0, "equilibrium")
    comp, level, other, direction, ref, side = _section(p, u0, v0)
    crossings = 0
    found: list[tuple[float, Vec]] = []

    def on_side(y):
        return ref is None or side == 0.0 or (y[other] - ref) * side > 0.0

    prev = {"t": 0.0, "y": (u0, v0)}

    def stop(t, y):
        nonlocal crossings
        ta, ya = prev["t"], prev["y"]
        prev["t"], prev["y"] = t, y
        ga = ya[comp] - level
        gb = y[comp] - level
        if not (ga * gb < 0.0 or (gb == 0.0 and ga != 0.0)):
            return None
        tc, yc = _bisect_crossing(f, ta, ya, t, comp, level)
        if not on_side(yc):
            return None
        crossings += 1
        if direction * (gb - ga) > 0.0:
            found.append((tc, yc))
            return "returned"
        return None

    try:
        traj = solve_ivp(f, 0.0, (u0, v0), t_max, Method.RKF45, tol=rk_tol, stop=stop)
    except IntegrationError as exc:
        # underflow while the state is huge is finite-time blow-up
        last = exc.trajectory.states[-1] if exc.trajectory else (0.0, 0.0)
        reason = "escape" if math.hypot(*last) > 1e6 else "integration failure"
        return PeriodReport(False, math.nan, math.nan, crossings, reason)
    if traj.stop_reason in ("blow-up", "non-finite", "domain"):
        return PeriodReport(False, math.nan, math.nan, crossings, "escape")
    if not found:
        return PeriodReport(False, math.nan, math.nan, crossings, "inconclusive")
    tc, yc = found[0]
    closure = math.hypot(yc[0] - u0, yc[1] - v0)
    periodic = closure < tol
    return PeriodReport(periodic, tc, closure, crossings, "closed" if periodic else "not closed")


def _bisect_crossing(f: Rhs, ta: float, ya: Vec, tb: float, comp: int, level: float):
    """Time and state where ``y[comp] == level`` inside an accepted step."""
    ga = ya[comp] - level
    lo, hi = 0.0, tb - ta
    y_hi = None
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        ym, _ = _rkf45_step(f, ta, ya, mid)
        if (ym[comp] - level > 0.0) == (ga > 0.0):
            lo = mid
        else:
            hi, y_hi = mid, ym
    if y_hi is None:
        y_hi, _ = _rkf45_step(f, ta, ya, hi)
    return ta + hi, y_hi
