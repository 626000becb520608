"""Numerical kernels: error function, adaptive quadrature, cubic roots, differences.

Everything here is plain Python on floats and deterministic, so results do
not depend on any third-party special-function library.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import DomainError, QuadratureError

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_EPS = 2.220446049250313e-16

# switch between the power series and the continued fraction
_ERF_SPLIT = 2.5
_ERFC_SPLIT = 1.0


def real_power(base: float, exponent: float) -> float:
    """``base ** exponent`` restricted to real results.

    Integer exponents accept any base (except zero with a negative
    exponent); fractional exponents require a non-negative base.
    """
    if float(exponent).is_integer():
        k = int(exponent)
        if base == 0.0 and k < 0:
            raise DomainError("zero raised to a negative power")
        return base ** k
    if base > 0.0:
        return base ** exponent
    if base == 0.0 and exponent > 0.0:
        return 0.0
    raise DomainError(f"{base!r} ** {exponent!r} is not real")


# ---------------------------------------------------------------------------
# error function

def _erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) exp(-x^2) sum 2^k x^(2k+1) / (2k+1)!!, all terms positive
    x2 = x * x
    term = x
    total = x
    k = 0
    while True:
        k += 1
        term *= 2.0 * x2 / (2 * k + 1)
        total += term
        if term <= 1e-17 * total:
            break
    return _TWO_OVER_SQRT_PI * math.exp(-x2) * total


def _erfc_cf(x: float) -> float:
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    k = 0
    while True:
        k += 1
        a = 0.5 * k
        d = x + a * d
        d = 1.0 / (d if d != 0.0 else tiny)
        c = x + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16 or k > 5000:
            break
    return math.exp(-x * x) * _INV_SQRT_PI / f


def erf(x: float) -> float:
    """Error function, absolute accuracy near machine precision."""
    if x != x:
        return x
    if x < 0.0:
        return -erf(-x)
    if x == 0.0:
        return 0.0
    if x < _ERF_SPLIT:
        return _erf_series(x)
    if x > 6.0:
        return 1.0
    return 1.0 - _erfc_cf(x)


def erfc(x: float) -> float:
    """Complementary error function ``1 - erf(x)`` without cancellation for large x."""
    if x < _ERFC_SPLIT:
        return 1.0 - erf(x)
    if x > 27.0:
        return 0.0
    return _erfc_cf(x)


def _erf_inv_seed(y: float) -> float:
    # single-precision closed-form estimate (M. Giles, 2010)
    w = -math.log((1.0 - y) * (1.0 + y))
    if w < 5.0:
        w -= 2.5
        p = 2.81022636e-08
        for c in (3.43273939e-07, -3.5233877e-06, -4.39150654e-06, 0.00021858087,
                  -0.00125372503, -0.00417768164, 0.246640727, 1.50140941):
            p = c + p * w
    else:
        w = math.sqrt(w) - 3.0
        p = -0.000200214257
        for c in (0.000100950558, 0.00134934322, -0.00367342844, 0.00573950773,
                  -0.0076224613, 0.00943887047, 1.00167406, 2.83297682):
            p = c + p * w
    return p * y


def erf_inv(y: float) -> float:
    """Inverse error function on the open interval (-1, 1).

    Newton iteration on ``erf`` (or on ``erfc`` for ``|y| > 1/2``, where the
    target ``1 - |y|`` is exact in floating point) from a closed-form seed.

    Raises
    ------
    DomainError
        If ``|y| >= 1``.
    """
    if not -1.0 < y < 1.0:
        raise DomainError(f"erf_inv requires |y| < 1, got {y!r}")
    if y == 0.0:
        return 0.0
    if y < 0.0:
        return -erf_inv(-y)
    x = _erf_inv_seed(y)
    if y <= 0.5:
        for _ in range(50):
            dx = (erf(x) - y) / (_TWO_OVER_SQRT_PI * math.exp(-x * x))
            x -= dx
            if abs(dx) <= 4 * _EPS * abs(x):
                break
    else:
        target = 1.0 - y
        for _ in range(50):
            # erfc'(x) = -2/sqrt(pi) exp(-x^2)
            dx = (erfc(x) - target) / (-_TWO_OVER_SQRT_PI * math.exp(-x * x))
            x -= dx
            if abs(dx) <= 4 * _EPS * abs(x):
                break
    return x


# ---------------------------------------------------------------------------
# adaptive quadrature

# 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1]
_XK = (0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
       0.207784955007898467600689403773245, 0.0)
_WK = (0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
       0.204432940075298892414161999234649, 0.209482141084727828012999174891714)
_WG = (0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
       0.381830050505118944950369775488975, 0.417959183673469387755102040816327)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    est_error: float
    evaluations: int


def _gk15(f, a, b):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    kron = _WK[7] * fc
    gauss = _WG[3] * fc
    for j in range(7):
        dx = half * _XK[j]
        x1, x2 = center - dx, center + dx
        f1, f2 = f(x1), f(x2)
        kron += _WK[j] * (f1 + f2)
        if j % 2 == 1:
            gauss += _WG[j // 2] * (f1 + f2)
    return kron * half, abs((kron - gauss) * half)


def adaptive_quad(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    singular: str | None = None,
    max_intervals: int = 2000,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` by globally adaptive Gauss-Kronrod bisection.

    Parameters
    ----------
    f : callable
        Integrand; must return finite values at every interior node.
    a, b : float
        Limits. ``b < a`` returns the negated integral over ``[b, a]``.
    tol : float
        Absolute error target for the whole interval.
    singular : {None, "a", "b", "both"}
        Endpoints carrying an inverse square-root singularity. Each named
        endpoint ``e`` is removed by the substitution ``x = e +/- s**2``;
        with ``"both"`` the interval is split at its midpoint first.
    max_intervals : int
        Subdivision budget.

    Returns
    -------
    QuadratureResult
        ``est_error`` is the summed Kronrod-minus-Gauss difference, which in
        practice overestimates the true error.

    Raises
    ------
    QuadratureError
        On a non-finite integrand value (the location is reported) or when
        the subdivision budget is exhausted.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if b < a:
        flipped = {"a": "b", "b": "a"}.get(singular, singular)
        res = adaptive_quad(f, b, a, tol, singular=flipped, max_intervals=max_intervals)
        return QuadratureResult(-res.value, res.est_error, res.evaluations)
    if singular == "both":
        mid = 0.5 * (a + b)
        left = adaptive_quad(f, a, mid, 0.5 * tol, singular="a", max_intervals=max_intervals)
        right = adaptive_quad(f, mid, b, 0.5 * tol, singular="b", max_intervals=max_intervals)
        return QuadratureResult(left.value + right.value, left.est_error + right.est_error,
                                left.evaluations + right.evaluations)
    if singular == "a":
        g = lambda s: 2.0 * s * f(a + s * s)  # noqa: E731
        return adaptive_quad(g, 0.0, math.sqrt(b - a), tol, max_intervals=max_intervals)
    if singular == "b":
        g = lambda s: 2.0 * s * f(b - s * s)  # noqa: E731
        return adaptive_quad(g, 0.0, math.sqrt(b - a), tol, max_intervals=max_intervals)
    if singular is not None:
        raise ValueError(f"unknown singular endpoint spec {singular!r}")

    evaluations = 0

    def checked(x):
        nonlocal evaluations
        evaluations += 1
        try:
            y = f(x)
        except (ZeroDivisionError, OverflowError, DomainError) as exc:
            raise QuadratureError(f"integrand failed at x={x!r}: {exc}") from exc
        if not math.isfinite(y):
            raise QuadratureError(f"non-finite integrand value at x={x!r}")
        return y

    value, err = _gk15(checked, a, b)
    # heap of (-error, insertion order, a, b, value, error); order keeps ties deterministic
    heap = [(-err, 0, a, b, value, err)]
    total, total_err = value, err
    counter = 1
    while total_err > max(tol, 50.0 * _EPS * abs(total)):
        if len(heap) >= max_intervals:
            raise QuadratureError(
                f"subdivision limit {max_intervals} reached on [{a!r}, {b!r}], "
                f"error estimate {total_err:.3e}")
        _, _, lo, hi, v, e = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureError(f"interval collapsed near x={mid!r}")
        v1, e1 = _gk15(checked, lo, mid)
        v2, e2 = _gk15(checked, mid, hi)
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2, e2))
        counter += 2
        # recompute sums from scratch to avoid drift from repeated subtraction
        total = math.fsum(item[4] for item in heap)
        total_err = math.fsum(item[5] for item in heap)
    return QuadratureResult(total, total_err, evaluations)


def gauss_legendre(f: Callable[[float], float], a: float, b: float, panels: int = 1) -> float:
    """Fixed 15-point Kronrod rule applied on ``panels`` equal sub-intervals."""
    h = (b - a) / panels
    return math.fsum(_gk15(f, a + i * h, a + (i + 1) * h)[0] for i in range(panels))


# ---------------------------------------------------------------------------
# cubic roots

class RealRoot(NamedTuple):
    value: float
    multiplicity: int


def _polish(coeffs, x):
    c3, c2, c1, c0 = coeffs
    fx = ((c3 * x + c2) * x + c1) * x + c0
    dfx = (3.0 * c3 * x + 2.0 * c2) * x + c1
    if dfx == 0.0:
        return x
    return x - fx / dfx


def cubic_roots(c3: float, c2: float, c1: float, c0: float) -> list[RealRoot]:
    """Real roots of ``c3 x^3 + c2 x^2 + c1 x + c0``, ascending.

    Uses the discriminant of the depressed cubic to pick the trigonometric
    (three real roots) or Cardano (one real root) form; a vanishing
    discriminant yields a double or triple root with its multiplicity.
    Simple roots get one Newton polish step.
    """
    if c3 == 0.0:
        raise DomainError("leading coefficient is zero; not a cubic")
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    # disc > 0: three distinct real roots
    disc = -(4.0 * p ** 3 + 27.0 * q * q)
    scale = 4.0 * abs(p) ** 3 + 27.0 * q * q
    coeffs = (c3, c2, c1, c0)
    # p and q carry rounding noise of the size of the terms they are built from
    if (abs(p) <= 1e-10 * (b * b + abs(c))
            and abs(q) <= 1e-10 * (abs(b) ** 3 + abs(b * c) + abs(d))):
        return [RealRoot(-shift, 3)]
    if scale == 0.0 or abs(disc) <= 1e-12 * scale:
        simple = 3.0 * q / p - shift
        double = -1.5 * q / p - shift
        roots = [RealRoot(_polish(coeffs, simple), 1), RealRoot(double, 2)]
        return sorted(roots, key=lambda r: r.value)
    if disc > 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (2.0 * p) * math.sqrt(-3.0 / p)))
        phi = math.acos(arg) / 3.0
        ts = [m * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
        values = sorted(_polish(coeffs, t - shift) for t in ts)
        merged: list[RealRoot] = []
        for v in values:
            if merged and abs(v - merged[-1].value) <= 1e-10 * max(1.0, abs(v)):
                merged[-1] = RealRoot(merged[-1].value, merged[-1].multiplicity + 1)
            else:
                merged.append(RealRoot(v, 1))
        return merged
    sq = math.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    t = math.copysign(abs(-q / 2.0 + sq) ** (1.0 / 3.0), -q / 2.0 + sq) \
        + math.copysign(abs(-q / 2.0 - sq) ** (1.0 / 3.0), -q / 2.0 - sq)
    return [RealRoot(_polish(coeffs, t - shift), 1)]


# ---------------------------------------------------------------------------
# finite differences

def second_derivative(f: Callable[[float], float], x: float, h: float) -> float:
    """Five-point central estimate of ``f''(x)`` with O(h^4) truncation error."""
    if h <= 0.0:
        raise ValueError("h must be positive")
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x)
            + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h)


def first_derivative(f: Callable[[float], float], x: float, h: float) -> float:
    """Five-point central estimate of ``f'(x)``."""
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h)
