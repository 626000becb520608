"""Parametric solution families on the two integrable lines, and the elliptic orbit.

First line ``n = 2 lambda + 1``::

    Y(tau) = a C1**2 exp(Theta),  q(tau) = b C1 tau exp(Theta/2)
    Theta  = int dtau / sqrt(C2 + psi(tau) + tau**2/4)
    psi    = tau**(2(lambda+1)) / (lambda+1)   (2 ln|tau| when lambda = -1)

Second line ``n = lambda - 1``::

    Y = a C1**(lambda-2) / Theta,  q = b C1**lambda tau / Theta
    Theta = C2 + int dtau / sqrt(1 + sign tau**lambda)

and its ``lambda = 0`` limit ``Y = C1/Theta``, ``q = b exp(sign tau**2)/Theta``,
``Theta = C2 + int exp(sign tau**2) dtau``.

The coefficient solved by each curve is derived from the constants by
substituting back into the equation:

* first line: ``alpha = a**lambda * b / b**n``, which is ``(a/b**2)**lambda``
  for ``b > 0`` and flips sign for ``b < 0`` when n is an integer;
* second line: ``alpha = sign * a**lambda * b**(2-lambda) * lambda/2``;
* lambda = 0: ``alpha = sign * 2 b**2``.

Indefinite integrals are anchored at a base point ``tau0`` where the
integral vanishes. ``tau0`` may sit on a simple zero of the radicand
(a turning point); that endpoint singularity is integrated exactly by a
square-root substitution.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

from scipy.optimize import brentq

from .errors import DomainError, QuadratureError
from .model import EfParams
from .numerics import adaptive_quad, cubic_roots, real_power

FIRST = "first"
SECOND = "second"
LAMBDA0 = "lambda0"

_PIECE_TOL = 1e-13
_SCAN_POINTS = 512


class Radicand:
    """A radicand with its first two derivatives, for integrals of ``1/sqrt(rad)``."""

    def __init__(self, f, df, d2f):
        self.f, self.df, self.d2f = f, df, d2f

    def __call__(self, tau):
        return self.f(tau)


def first_radicand(C2: float, lam: float) -> Radicand:
    """``C2 + psi(tau) + tau**2/4``."""
    if lam == -1.0:
        def f(tau):
            if tau == 0.0:
                raise DomainError("psi = 2 ln|tau| is singular at tau = 0")
            return C2 + 2.0 * math.log(abs(tau)) + 0.25 * tau * tau
        return Radicand(f, lambda t: 2.0 / t + 0.5 * t, lambda t: -2.0 / (t * t) + 0.5)
    e = 2.0 * (lam + 1.0)
    return Radicand(lambda t: C2 + real_power(t, e) / (lam + 1.0) + 0.25 * t * t,
                    lambda t: 2.0 * real_power(t, e - 1.0) + 0.5 * t,
                    lambda t: 2.0 * (e - 1.0) * real_power(t, e - 2.0) + 0.5)


def second_radicand(lam: float, sign: float) -> Radicand:
    """``1 + sign * tau**lambda``."""
    return Radicand(lambda t: 1.0 + sign * real_power(t, lam),
                    lambda t: sign * lam * real_power(t, lam - 1.0),
                    lambda t: sign * lam * (lam - 1.0) * real_power(t, lam - 2.0))


def _turning_integral(rad: Radicand, r: float, length: float, direction: float,
                      tol: float) -> float:
    """``int_r^{r + direction*length} dtau / sqrt(rad)`` where ``rad(r) = 0``.

    With ``tau = r + direction * s**2`` the integrand becomes
    ``2 / sqrt(rad(tau) / s**2)``, smooth at s = 0. For tiny offsets the ratio
    comes from a Taylor expansion, since ``rad`` itself has no significant
    digits left there.
    """
    d1 = direction * rad.df(r)
    d2 = 0.5 * rad.d2f(r)
    h_switch = 1e-6 * max(1.0, abs(r))

    def g(s):
        h = s * s
        if h < h_switch:
            ratio = d1 + d2 * h
        else:
            ratio = rad(r + direction * h) / h
        if ratio <= 0.0:
            raise DomainError(f"radicand not positive at tau={r + direction * h!r}")
        return 2.0 / math.sqrt(ratio)

    return direction * adaptive_quad(g, 0.0, math.sqrt(length), tol).value


class _Theta:
    """Integral of ``1/sqrt(rad)`` (or of ``weight``) from ``tau0``, plus a constant."""

    def __init__(self, tau0: float, offset: float = 0.0, radicand=None, weight=None,
                 tol: float = 1e-10):
        self.tau0 = tau0
        self.offset = offset
        self.radicand = radicand
        self.weight = weight
        self.tol = tol
        self._anchors: list[float] = [tau0]
        self._values: list[float] = [offset]

    def integrand(self, tau):
        if self.weight is not None:
            return self.weight(tau)
        r = self.radicand(tau)
        if r <= 0.0:
            raise DomainError(f"radicand {r!r} is not positive at tau={tau!r}")
        return 1.0 / math.sqrt(r)

    def _is_turning(self, tau):
        if self.radicand is None:
            return False
        try:
            r = self.radicand(tau)
        except DomainError:
            return False
        return abs(r) <= 1e-13

    def check_path(self, end: float):
        """Raise DomainError at the first point between tau0 and ``end`` where the integrand fails."""
        start = self.tau0
        if start == end:
            return
        for i in range(_SCAN_POINTS + 1):
            tau = start + (end - start) * i / _SCAN_POINTS
            if (i == 0 or i == _SCAN_POINTS) and self._is_turning(tau):
                continue
            try:
                value = self.integrand(tau)
            except (DomainError, ZeroDivisionError, OverflowError) as exc:
                raise DomainError(f"integrand undefined at tau={tau!r}: {exc}") from None
            if not math.isfinite(value):
                raise DomainError(f"integrand not finite at tau={tau!r}")

    def piece(self, a: float, b: float, tol: float | None = None) -> float:
        if a == b:
            return 0.0
        tol = tol or _PIECE_TOL
        sa, sb = self._is_turning(a), self._is_turning(b)
        try:
            if sa and sb:
                m = 0.5 * (a + b)
                return self.piece(a, m, tol) - _turning_integral(
                    self.radicand, b, abs(b - m), math.copysign(1.0, m - b), tol)
            if sa:
                return _turning_integral(self.radicand, a, abs(b - a),
                                         math.copysign(1.0, b - a), tol)
            if sb:
                return -_turning_integral(self.radicand, b, abs(a - b),
                                          math.copysign(1.0, a - b), tol)
            return adaptive_quad(self.integrand, a, b, tol).value
        except QuadratureError as exc:
            if isinstance(exc.__cause__, DomainError):
                raise DomainError(str(exc)) from exc
            raise

    def add_anchor(self, tau: float, value: float):
        i = bisect.bisect_left(self._anchors, tau)
        if i < len(self._anchors) and self._anchors[i] == tau:
            return
        self._anchors.insert(i, tau)
        self._values.insert(i, value)

    def __call__(self, tau: float) -> float:
        # integrate from the nearest anchor on the tau0 side to keep pieces short
        i = bisect.bisect_left(self._anchors, tau)
        best = None
        for j in (i - 1, i):
            if 0 <= j < len(self._anchors):
                d = abs(self._anchors[j] - tau)
                if best is None or d < best[0]:
                    best = (d, j)
        j = best[1]
        return self._values[j] + self.piece(self._anchors[j], tau)

    def cumulative(self, taus: list[float]) -> list[float]:
        """Values at ascending ``taus``, built piece by piece outward from tau0."""
        out = [0.0] * len(taus)
        above = [i for i, t in enumerate(taus) if t >= self.tau0]
        below = [i for i, t in enumerate(taus) if t < self.tau0][::-1]
        for order in (above, below):
            prev_tau, prev_val = self.tau0, self.offset
            for i in order:
                prev_val = prev_val + self.piece(prev_tau, taus[i])
                prev_tau = taus[i]
                out[i] = prev_val
                self.add_anchor(prev_tau, prev_val)
        return out


def theta_first(tau: float, tau0: float, C2: float, lam: float, tol: float = 1e-10) -> float:
    """``int_{tau0}^{tau} dt / sqrt(C2 + psi(t) + t**2/4)``.

    ``tau0`` or ``tau`` may be a simple zero of the radicand.

    Raises
    ------
    DomainError
        If the radicand is not positive somewhere strictly between the ends;
        the message names the first offending point walking from ``tau0``.
    """
    th = _Theta(tau0, radicand=first_radicand(C2, lam), tol=tol)
    th.check_path(tau)
    return th.piece(tau0, tau, tol)


def sample_taus(tau_range) -> list[float]:
    lo, hi, count = tau_range
    count = int(count)
    if count < 1:
        raise ValueError("tau_range count must be positive")
    if count == 1:
        return [float(lo)]
    return [lo + (i * (hi - lo)) / (count - 1) for i in range(count)]


@dataclass
class ParametricCurve:
    family: str
    tau: list[float]
    Y: list[float]
    q: list[float]
    constants: dict
    alpha: float
    segments: list[tuple[int, int]]
    _theta: _Theta = field(repr=False, compare=False, default=None)
    _point: Callable = field(repr=False, compare=False, default=None)

    @property
    def lam(self) -> float:
        return self.constants["lambda"]

    @property
    def equation(self) -> EfParams:
        """The EF equation the ``(Y, q)`` samples solve."""
        lam = self.lam
        n = {FIRST: 2.0 * lam + 1.0, SECOND: lam - 1.0, LAMBDA0: -1.0}[self.family]
        return EfParams(self.alpha, lam, n)

    @property
    def physical(self) -> bool:
        """True when every sample has ``Y > 0``."""
        return all(y > 0.0 for y in self.Y)

    def point(self, tau: float) -> tuple[float, float]:
        """Exact ``(Y, q)`` at ``tau`` (integral recomputed from the nearest sample)."""
        return self._point(tau)

    def theta(self, tau: float) -> float:
        return self._theta(tau)

    def identity_ratio(self) -> list[float]:
        """``q**2 alpha**(1/lambda) / (tau**2 Y)`` per sample (first line only; 1 when exact)."""
        if self.family != FIRST:
            raise ValueError("identity holds for the first-line family only")
        scale = real_power(self.alpha, 1.0 / self.lam)
        return [q * q * scale / (t * t * y) if t != 0.0 else math.nan
                for t, y, q in zip(self.tau, self.Y, self.q)]

    def q_of_Y(self, Y: float, segment: int = 0) -> float:
        """Invert ``Y(tau)`` on one monotone segment and return ``q`` there."""
        start, stop = self.segments[segment]
        ys = self.Y[start:stop]
        taus = self.tau[start:stop]
        for k in range(len(ys) - 1):
            y1, y2 = ys[k], ys[k + 1]
            if min(y1, y2) <= Y <= max(y1, y2):
                if Y == y1:
                    return self.q[start + k]
                if Y == y2:
                    return self.q[start + k + 1]
                t = brentq(lambda tt: self._point(tt)[0] - Y, taus[k], taus[k + 1],
                           xtol=1e-300, rtol=8.9e-16, maxiter=200)
                return self._point(t)[1]
        raise DomainError(f"Y={Y!r} outside segment range [{min(ys)!r}, {max(ys)!r}]")

    def Y_range(self, segment: int = 0) -> tuple[float, float]:
        start, stop = self.segments[segment]
        ys = self.Y[start:stop]
        return min(ys), max(ys)


def _default_tau0(th_integrand, lo, hi):
    if lo <= 0.0 <= hi:
        try:
            if math.isfinite(th_integrand(0.0)):
                return 0.0
        except (DomainError, ZeroDivisionError, OverflowError):
            pass
    return lo


def _split_segments(thetas: list[float]) -> tuple[list[int], list[tuple[int, int]]]:
    keep = [i for i, th in enumerate(thetas) if th != 0.0]
    segments = []
    start = 0
    for k in range(1, len(keep) + 1):
        if k == len(keep) or (thetas[keep[k]] > 0.0) != (thetas[keep[k - 1]] > 0.0):
            segments.append((start, k))
            start = k
    return keep, segments


def _sign(sign) -> float:
    if sign in (1, "+", "plus", 1.0):
        return 1.0
    if sign in (-1, "-", "minus", -1.0):
        return -1.0
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def curve_first(lam: float, C1: float, C2: float, a: float, b: float, tau_range,
                tau0: float | None = None, tol: float = 1e-10) -> ParametricCurve:
    """Sample the first-line family over ``tau_range = (lo, hi, count)``."""
    if a == 0.0 or b == 0.0 or C1 == 0.0:
        raise DomainError("a, b and C1 must be nonzero")
    n = 2.0 * lam + 1.0
    alpha = real_power(a, lam) * b / real_power(b, n)
    taus = sample_taus(tau_range)
    th = _Theta(0.0, radicand=first_radicand(C2, lam), tol=tol)
    if tau0 is None:
        tau0 = _default_tau0(th.integrand, taus[0], taus[-1])
    th.tau0 = tau0
    th._anchors, th._values = [tau0], [0.0]
    th.check_path(taus[0])
    th.check_path(taus[-1])
    thetas = th.cumulative(taus)

    def point(tau):
        t = th(tau)
        return a * C1 * C1 * math.exp(t), b * C1 * tau * math.exp(0.5 * t)

    Y = [a * C1 * C1 * math.exp(t) for t in thetas]
    q = [b * C1 * tau * math.exp(0.5 * t) for tau, t in zip(taus, thetas)]
    consts = {"C1": C1, "C2": C2, "a": a, "b": b, "lambda": lam, "tau0": tau0}
    return ParametricCurve(FIRST, taus, Y, q, consts, alpha, [(0, len(taus))], th, point)


def curve_second(lam: float, C1: float, C2: float, a: float, b: float, sign, tau_range,
                 tau0: float | None = None, tol: float = 1e-10) -> ParametricCurve:
    """Sample the second-line family; zero crossings of Theta split the curve into segments."""
    if lam == 0.0:
        raise DomainError("lambda = 0 has its own family, see curve_lambda0")
    sgn = _sign(sign)
    alpha = sgn * real_power(a, lam) * real_power(b, 2.0 - lam) * lam / 2.0
    kY = a * real_power(C1, lam - 2.0)
    kq = b * real_power(C1, lam)
    taus = sample_taus(tau_range)
    th = _Theta(0.0, offset=C2, radicand=second_radicand(lam, sgn), tol=tol)
    if tau0 is None:
        tau0 = _default_tau0(th.integrand, taus[0], taus[-1])
    th.tau0 = tau0
    th._anchors, th._values = [tau0], [C2]
    th.check_path(taus[0])
    th.check_path(taus[-1])
    thetas = th.cumulative(taus)
    return _finish(SECOND, taus, thetas, lambda tau, t: (kY / t, kq * tau / t),
                   {"C1": C1, "C2": C2, "a": a, "b": b, "lambda": lam, "sign": sgn,
                    "tau0": tau0}, alpha, th)


def curve_lambda0(C1: float, C2: float, b: float, sign, tau_range,
                  tau0: float | None = None, tol: float = 1e-10) -> ParametricCurve:
    """Sample the lambda = 0 family ``Y = C1/Theta, q = b exp(sign tau**2)/Theta``."""
    sgn = _sign(sign)
    alpha = sgn * 2.0 * b * b
    taus = sample_taus(tau_range)
    weight = lambda tau: math.exp(sgn * tau * tau)  # noqa: E731
    if tau0 is None:
        tau0 = _default_tau0(weight, taus[0], taus[-1])
    th = _Theta(tau0, offset=C2, weight=weight, tol=tol)
    thetas = th.cumulative(taus)
    return _finish(LAMBDA0, taus, thetas, lambda tau, t: (C1 / t, b * weight(tau) / t),
                   {"C1": C1, "C2": C2, "a": None, "b": b, "lambda": 0.0, "sign": sgn,
                    "tau0": tau0}, alpha, th)


def _finish(family, taus, thetas, formula, consts, alpha, th):
    keep, segments = _split_segments(thetas)
    points = [formula(taus[i], thetas[i]) for i in keep]
    curve = ParametricCurve(
        family, [taus[i] for i in keep], [p[0] for p in points], [p[1] for p in points],
        consts, alpha, segments, th, lambda tau: formula(tau, th(tau)))
    return curve


# ---------------------------------------------------------------------------
# elliptic large-amplitude orbits of the lambda = 1/2 case

def elliptic_rhs(tau: float, C2: float) -> float:
    """``(dtau/dTheta)**2 = 2 tau**3 / 3 + tau**2 / 4 + C2``."""
    return 2.0 * tau ** 3 / 3.0 + 0.25 * tau * tau + C2


@dataclass
class EllipticOrbit:
    """One period of ``tau(Theta)``, starting at the lower turning point."""

    C2: float
    turning_points: tuple[float, float]
    period: float
    theta: list[float]
    tau: list[float]

    def __call__(self, theta: float) -> float:
        x = theta % self.period
        i = bisect.bisect_right(self.theta, x) - 1
        i = min(max(i, 0), len(self.theta) - 2)
        t0, t1 = self.theta[i], self.theta[i + 1]
        w = (x - t0) / (t1 - t0)
        return (1.0 - w) * self.tau[i] + w * self.tau[i + 1]


def elliptic_orbit(C2: float, samples: int = 64, tol: float = 1e-12) -> EllipticOrbit | None:
    """Periodic solution of the elliptic equation between two simple turning points.

    Returns None when the cubic has no bounded interval of positivity
    delimited by simple roots (one real root, or the homoclinic C2 = 0 case
    where the upper end is a double root).
    """
    if samples < 16:
        raise ValueError("samples must be at least 16")
    roots = cubic_roots(2.0 / 3.0, 0.25, 0.0, C2)
    if len(roots) < 2:
        return None
    for left, right in zip(roots, roots[1:]):
        mid = 0.5 * (left.value + right.value)
        if elliptic_rhs(mid, C2) > 0.0:
            if left.multiplicity != 1 or right.multiplicity != 1:
                return None
            r1, r2 = left.value, right.value
            break
    else:
        return None

    rad = Radicand(lambda t: elliptic_rhs(t, C2), lambda t: 2.0 * t * t + 0.5 * t,
                   lambda t: 4.0 * t + 0.5)
    th = _Theta(r1, radicand=rad)
    mid = 0.5 * (r1 + r2)
    half = (_turning_integral(rad, r1, mid - r1, 1.0, tol)
            - _turning_integral(rad, r2, r2 - mid, -1.0, tol))
    # Chebyshev spacing concentrates samples near the turning points
    m = samples // 2 + 1
    taus = [r1 + (r2 - r1) * 0.5 * (1.0 - math.cos(math.pi * k / (m - 1))) for k in range(m)]
    taus[-1] = r2
    thetas = [0.0]
    for k in range(1, m - 1):
        thetas.append(thetas[-1] + th.piece(taus[k - 1], taus[k], tol))
    thetas.append(half)
    full_theta = thetas + [2.0 * half - x for x in reversed(thetas[:-1])]
    full_tau = taus + list(reversed(taus[:-1]))
    return EllipticOrbit(C2, (r1, r2), 2.0 * half, full_theta, full_tau)
