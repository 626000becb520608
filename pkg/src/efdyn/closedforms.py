"""Analytic solutions of EF equations and a finite-difference residual check.

Each family is available as a plain function and through :class:`ClosedForm`,
which bundles parameters, the interval of validity, the slope and the EF
equation the family solves.

Sign conventions worth knowing:

* ``pseudo_solution`` does not depend on ``branch`` (``erf_inv`` is odd and
  is squared); ``branch`` only matters for ``pseudo_quadrature``, where
  ``+1`` returns the side ``Y < Y0`` on which q increases.
* ``diode_partner`` satisfies ``sqrt(w) w_ss = +1``, that is the partner
  equation ``w_ss = alpha w**(-1/2)`` with ``alpha = +1``. The literature
  form of the plane-diode equation is often printed as ``sqrt(w) w_ss + 1 = 0``;
  that sign is not satisfied by this solution.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError
from .model import EfParams
from .numerics import erf, erf_inv, real_power, second_derivative

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_SQRT_PI_OVER_2 = math.sqrt(math.pi / 2.0)


def _branch_sign(branch) -> float:
    if branch in (1, "+", "plus"):
        return 1.0
    if branch in (-1, "-", "minus"):
        return -1.0
    raise ValueError(f"branch must be +1/-1 or '+'/'-', got {branch!r}")


def pseudo_amplitude(H: float) -> float:
    return _SQRT_PI_OVER_2 * math.exp(0.5 * H)


def pseudo_solution(H: float, Y0: float, branch, Y: float) -> float:
    """Solution of ``q q_YY + 1 = 0`` with energy ``H`` peaking at ``Y0``.

    ``q(Y) = sqrt(2/pi) A exp(-erf_inv(-/+ (Y - Y0)/A)**2)``, ``A = sqrt(pi/2) exp(H/2)``.
    Defined for ``|Y - Y0| < A``; q tends to zero at both ends.
    """
    A = pseudo_amplitude(H)
    z = -_branch_sign(branch) * (Y - Y0) / A
    if not -1.0 < z < 1.0:
        raise DomainError(f"|Y - Y0| must be below A = {A!r}; solution ends at Y0 +/- A")
    x = erf_inv(z)
    return _SQRT_2_OVER_PI * A * math.exp(-x * x)


def pseudo_slope(H: float, Y0: float, Y: float) -> float:
    A = pseudo_amplitude(H)
    z = (Y - Y0) / A
    if not -1.0 < z < 1.0:
        raise DomainError(f"|Y - Y0| must be below A = {A!r}")
    return -math.sqrt(2.0) * erf_inv(z)


def pseudo_quadrature(H: float, q: float, branch) -> float:
    """Offset ``Y - Y0`` at which the pseudo-oscillator solution takes the value ``q``.

    ``Y - Y0 = -/+ A erf(sqrt(H/2 - ln q))`` where the upper sign is
    ``branch=+1``.
    """
    if q <= 0.0:
        raise DomainError("pseudo_quadrature requires q > 0")
    arg = 0.5 * H - math.log(q)
    if -4e-16 * max(1.0, abs(H)) < arg < 0.0:
        arg = 0.0  # q rounded just above the peak
    if arg < 0.0:
        raise DomainError(f"q exceeds the peak value exp(H/2) = {math.exp(0.5 * H)!r}")
    return -_branch_sign(branch) * pseudo_amplitude(H) * erf(math.sqrt(arg))


def _ermakov_radicand(C: float, Y: float) -> float:
    return 1.0 - 2.0 * C * Y + (C * C - 1.0) * Y * Y


def ermakov_general(C: float, Y: float) -> float:
    """``sqrt(1 - 2 C Y + (C**2 - 1) Y**2)``, solving ``q**3 q_YY + 1 = 0``; C is its invariant."""
    r = _ermakov_radicand(C, Y)
    if r <= 0.0:
        raise DomainError(f"radicand 1 - 2CY + (C^2-1)Y^2 = {r!r} is not positive")
    return math.sqrt(r)


def ermakov_slope(C: float, Y: float) -> float:
    return (-C + (C * C - 1.0) * Y) / ermakov_general(C, Y)


def pinney(Y: float) -> float:
    """``sqrt(1 - Y**2)``, the C = 0 member of :func:`ermakov_general`."""
    return ermakov_general(0.0, Y)


def ermakov_domain(C: float) -> tuple[float, float]:
    """Maximal open interval containing Y = 0 on which :func:`ermakov_general` is real."""
    if C == 1.0:
        return (-math.inf, 0.5)
    if C == -1.0:
        return (-0.5, math.inf)
    r1, r2 = sorted((1.0 / (C - 1.0), 1.0 / (C + 1.0)))
    if abs(C) < 1.0:
        return (r1, r2)
    # upward parabola, Y = 0 lies outside [r1, r2]
    return (-math.inf, r1) if r1 > 0.0 else (r2, math.inf)


def ermakov_partner(s: float) -> float:
    """``sqrt(s**2 - 1)``, solving ``w**3 w_ss + 1 = 0`` for ``|s| > 1``."""
    if abs(s) <= 1.0:
        raise DomainError("ermakov_partner requires |s| > 1")
    return math.sqrt(s * s - 1.0)


def sech_soliton(Y: float) -> float:
    """``(3/8) sqrt(Y) sech(ln(Y)/4)**2`` for ``Y > 0``; equals ``1.5 Y / (1 + sqrt(Y))**2``."""
    if Y <= 0.0:
        raise DomainError("sech_soliton requires Y > 0")
    return 0.375 * math.sqrt(Y) / math.cosh(0.25 * math.log(Y)) ** 2


def sech_soliton_slope(Y: float) -> float:
    if Y <= 0.0:
        raise DomainError("sech_soliton requires Y > 0")
    return 1.5 / (1.0 + math.sqrt(Y)) ** 3


_DIODE_C = 1.5 ** (4.0 / 3.0)


def diode_partner(s: float) -> float:
    """``(3/2) * (3/2 (1+s)**4)**(1/3)`` for ``s > -1``."""
    if s <= -1.0:
        raise DomainError("diode_partner requires s > -1")
    return 1.5 * (1.5 * (1.0 + s) ** 4) ** (1.0 / 3.0)


def diode_slope(s: float) -> float:
    if s <= -1.0:
        raise DomainError("diode_partner requires s > -1")
    return 4.0 / 3.0 * _DIODE_C * (1.0 + s) ** (1.0 / 3.0)


def aslanov_general(k: float, p: float, x: float) -> float:
    """``(1 + x**(k(p+2)) / (k**2 (p+3)))**(-1/(p+2))``.

    Solves ``y'' + (k+1)/x y' + x**(2k+kp-2) y**(2p+5) = 0``.
    """
    if p in (-2.0, -3.0) or k == 0.0:
        raise DomainError("aslanov_general requires k != 0 and p not in {-2, -3}")
    base = 1.0 + real_power(x, k * (p + 2.0)) / (k * k * (p + 3.0))
    if base <= 0.0:
        raise DomainError(f"aslanov_general base {base!r} is not positive")
    return base ** (-1.0 / (p + 2.0))


def aslanov_slope(k: float, p: float, x: float) -> float:
    m = k * (p + 2.0)
    K = k * k * (p + 3.0)
    base = 1.0 + real_power(x, m) / K
    return -1.0 / (p + 2.0) * base ** (-1.0 / (p + 2.0) - 1.0) * m * real_power(x, m - 1.0) / K


def aslanov_particular(x: float) -> float:
    """``9x / (2 + 3 sqrt(x))**2``, the (k, p) = (-1, -3/2) member of :func:`aslanov_general`."""
    if x < 0.0:
        raise DomainError("aslanov_particular requires x >= 0")
    return 9.0 * x / (2.0 + 3.0 * math.sqrt(x)) ** 2


def aslanov_particular_slope(x: float) -> float:
    if x < 0.0:
        raise DomainError("aslanov_particular requires x >= 0")
    c = 2.0 / 3.0
    return c / (c + math.sqrt(x)) ** 3


# ---------------------------------------------------------------------------
# residual oracles

def _default_h(Y):
    return 1e-4 * max(1.0, abs(Y))


def ef_residual(p: EfParams, f: Callable[[float], float], Y: float, h: float | None = None) -> float:
    """``|f''(Y) - alpha Y**(-lambda-2) f(Y)**n|`` with a five-point ``f''``."""
    if h is None:
        h = _default_h(Y)
    fpp = second_derivative(f, Y, h)
    return abs(fpp - p.alpha * real_power(Y, -p.lam - 2.0) * real_power(f(Y), p.n))


def aslanov_residual(k: float, p: float, f: Callable[[float], float], x: float,
                     h: float | None = None) -> float:
    """Residual of ``y'' + (k+1)/x y' + x**(2k+kp-2) y**(2p+5) = 0`` by finite differences."""
    if h is None:
        h = _default_h(x)
    fp = (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h)
    fpp = second_derivative(f, x, h)
    return abs(fpp + (k + 1.0) / x * fp
               + real_power(x, 2 * k + k * p - 2.0) * real_power(f(x), 2 * p + 5.0))


# ---------------------------------------------------------------------------
# bundled families

class Family(str, enum.Enum):
    PSEUDO_ERF = "pseudo_erf"
    ERMAKOV_GENERAL = "ermakov_general"
    PINNEY = "pinney"
    ERMAKOV_PARTNER = "ermakov_partner"
    SECH_SOLITON = "sech_soliton"
    DIODE_PARTNER = "diode_partner"
    ASLANOV_GENERAL = "aslanov_general"
    ASLANOV_PARTICULAR = "aslanov_particular"


PSEUDO_OSCILLATOR = EfParams(-1.0, -2.0, -1.0)
ERMAKOV = EfParams(-1.0, -2.0, -3.0)
POSITIVE_POWER = EfParams(-1.0, 0.5, 2.0)
# w_ss = alpha w**(-1/2) written in EF form (no explicit s dependence)
DIODE = EfParams(1.0, -2.0, -0.5)


@dataclass(frozen=True)
class ClosedForm:
    family: Family
    params: dict = field(default_factory=dict)
    domain: tuple[float, float] = (-math.inf, math.inf)

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty domain {self.domain!r}")

    def __call__(self, x: float) -> float:
        fam, pr = self.family, self.params
        if fam is Family.PSEUDO_ERF:
            return pseudo_solution(pr["H"], pr["Y0"], pr.get("branch", 1), x)
        if fam is Family.ERMAKOV_GENERAL:
            return ermakov_general(pr["C"], x)
        if fam is Family.PINNEY:
            return pinney(x)
        if fam is Family.ERMAKOV_PARTNER:
            return ermakov_partner(x)
        if fam is Family.SECH_SOLITON:
            return sech_soliton(x)
        if fam is Family.DIODE_PARTNER:
            return diode_partner(x)
        if fam is Family.ASLANOV_GENERAL:
            return aslanov_general(pr["k"], pr["p"], x)
        return aslanov_particular(x)

    def slope(self, x: float) -> float:
        fam, pr = self.family, self.params
        if fam is Family.PSEUDO_ERF:
            return pseudo_slope(pr["H"], pr["Y0"], x)
        if fam is Family.ERMAKOV_GENERAL:
            return ermakov_slope(pr["C"], x)
        if fam is Family.PINNEY:
            return ermakov_slope(0.0, x)
        if fam is Family.ERMAKOV_PARTNER:
            return x / ermakov_partner(x)
        if fam is Family.SECH_SOLITON:
            return sech_soliton_slope(x)
        if fam is Family.DIODE_PARTNER:
            return diode_slope(x)
        if fam is Family.ASLANOV_GENERAL:
            return aslanov_slope(pr["k"], pr["p"], x)
        return aslanov_particular_slope(x)

    @property
    def equation(self) -> EfParams | None:
        """The EF equation solved by this family, or None for the general Aslanov form."""
        return {
            Family.PSEUDO_ERF: PSEUDO_OSCILLATOR,
            Family.ERMAKOV_GENERAL: ERMAKOV,
            Family.PINNEY: ERMAKOV,
            Family.ERMAKOV_PARTNER: ERMAKOV,
            Family.SECH_SOLITON: POSITIVE_POWER,
            Family.DIODE_PARTNER: DIODE,
            Family.ASLANOV_PARTICULAR: POSITIVE_POWER,
        }.get(self.family)

    def residual(self, x: float, h: float | None = None) -> float:
        eq = self.equation
        if eq is None:
            return aslanov_residual(self.params["k"], self.params["p"], self, x, h)
        return ef_residual(eq, self, x, h)

    def interior(self, count: int, margin: float = 0.05, span: float = 10.0) -> list[float]:
        """``count`` evenly spaced points strictly inside the domain.

        Infinite ends are replaced by a window of width ``span`` from the
        finite end; a fraction ``margin`` of the width is trimmed off each side.
        """
        lo, hi = self.domain
        if math.isinf(lo) and math.isinf(hi):
            lo, hi = -0.5 * span, 0.5 * span
        elif math.isinf(lo):
            lo = hi - span
        elif math.isinf(hi):
            hi = lo + span
        width = hi - lo
        a, b = lo + margin * width, hi - margin * width
        if count == 1:
            return [0.5 * (a + b)]
        return [a + (b - a) * i / (count - 1) for i in range(count)]

    def contains(self, x: float) -> bool:
        lo, hi = self.domain
        return lo < x < hi


def closed_form(family, **params) -> ClosedForm:
    """Build a :class:`ClosedForm` with its domain filled in."""
    family = Family(family)
    if family is Family.PSEUDO_ERF:
        H = float(params.get("H", 0.0))
        Y0 = float(params.get("Y0", 0.0))
        A = pseudo_amplitude(H)
        return ClosedForm(family, {"H": H, "Y0": Y0, "branch": params.get("branch", 1)},
                          (Y0 - A, Y0 + A))
    if family is Family.ERMAKOV_GENERAL:
        C = float(params.get("C", 0.0))
        return ClosedForm(family, {"C": C}, ermakov_domain(C))
    if family is Family.PINNEY:
        return ClosedForm(family, {}, (-1.0, 1.0))
    if family is Family.ERMAKOV_PARTNER:
        return ClosedForm(family, {}, (1.0, math.inf))
    if family in (Family.SECH_SOLITON, Family.ASLANOV_PARTICULAR):
        return ClosedForm(family, {}, (0.0, math.inf))
    if family is Family.DIODE_PARTNER:
        return ClosedForm(family, {}, (-1.0, math.inf))
    k = float(params.get("k", -1.0))
    p = float(params.get("p", -1.5))
    if p in (-2.0, -3.0) or k == 0.0:
        raise DomainError("aslanov_general requires k != 0 and p not in {-2, -3}")
    m, K = k * (p + 2.0), k * k * (p + 3.0)
    hi = math.inf
    if K < 0.0:
        # base 1 + x**m / K stays positive only while x**m < -K
        hi = (-K) ** (1.0 / m) if m > 0.0 else math.inf
        if m < 0.0:
            return ClosedForm(family, {"k": k, "p": p}, ((-K) ** (1.0 / m), math.inf))
    return ClosedForm(family, {"k": k, "p": p}, (0.0, hi))
