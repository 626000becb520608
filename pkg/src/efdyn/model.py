"""The Emden-Fowler family ``q_YY = alpha * Y**(-lambda-2) * q**n`` and its phase plane.

Writing the equation in self-adjoint form with ``xi = 1/Y`` and then using
the Jordan-Smith variables turns it into the planar polynomial system::

    du/dt = -u (1 + u - alpha v)
    dv/dt =  v (1 + lambda + n u - alpha v)

with ``t = ln xi``. The classical names of the system variables are X and
Y; here they are ``u`` and ``v`` so that ``Y`` always means the physical
independent variable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

DEFAULT_TOL = 1e-9
COINCIDENCE_DIST = 1e-9


@dataclass(frozen=True)
class EfParams:
    """Coefficient ``alpha`` and exponents ``lam`` (lambda) and ``n`` of one EF equation."""

    alpha: float
    lam: float
    n: float

    def __post_init__(self):
        for name in ("alpha", "lam", "n"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.alpha == 0.0:
            raise ValueError("alpha must be nonzero")


@dataclass(frozen=True)
class SystemState:
    u: float
    v: float
    t: float = 0.0


class Kind(str, enum.Enum):
    SADDLE = "saddle"
    STABLE_NODE = "stable_node"
    UNSTABLE_NODE = "unstable_node"
    STABLE_SPIRAL = "stable_spiral"
    UNSTABLE_SPIRAL = "unstable_spiral"
    CENTER = "center"
    DEGENERATE_NODE = "degenerate_node"
    NON_HYPERBOLIC = "non_hyperbolic"

    @property
    def label(self) -> str:
        if self is Kind.CENTER:
            # nonlinear terms may still break a linear center
            return "center (linear analysis)"
        return self.value.replace("_", " ")


class PointIndex(str, enum.Enum):
    P0 = "P0"
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"


@dataclass(frozen=True)
class EquilibriumPoint:
    index: PointIndex
    u: float
    v: float
    delta1: float
    delta2: float
    discriminant: float
    kind: Kind
    coincident_with: tuple[PointIndex, ...] = ()


class Equilibria(list):
    """List of :class:`EquilibriumPoint`; ``p3_defined`` is False when n = 1."""

    def __init__(self, points, p3_defined=True):
        super().__init__(points)
        self.p3_defined = p3_defined

    def get(self, index):
        index = PointIndex(index)
        for point in self:
            if point.index is index:
                return point
        return None


@dataclass(frozen=True)
class RosenauStatus:
    first: bool
    second: bool
    tolerance: float = DEFAULT_TOL


@dataclass(frozen=True)
class CenterCondition:
    necessary: bool
    sufficient: bool


def vector_field(p: EfParams, s: SystemState) -> tuple[float, float]:
    u, v = s.u, s.v
    return -u * (1.0 + u - p.alpha * v), v * (1.0 + p.lam + p.n * u - p.alpha * v)


def jacobian(p: EfParams, s: SystemState) -> tuple[tuple[float, float], tuple[float, float]]:
    u, v = s.u, s.v
    a = p.alpha
    return ((-1.0 - 2.0 * u + a * v, a * u),
            (p.n * v, 1.0 + p.lam + p.n * u - 2.0 * a * v))


def trace_det(p: EfParams, s: SystemState) -> tuple[float, float, float]:
    """Trace, determinant and discriminant ``trace**2 - 4 det`` of the Jacobian.

    The discriminant is evaluated as ``(j11 - j22)**2 + 4 j12 j21``, which
    avoids cancellation near repeated eigenvalues.
    """
    (j11, j12), (j21, j22) = jacobian(p, s)
    d1 = j11 + j22
    d2 = j11 * j22 - j12 * j21
    return d1, d2, (j11 - j22) ** 2 + 4.0 * j12 * j21


def classify(delta1: float, delta2: float, tol: float = DEFAULT_TOL) -> Kind:
    """Linear type of an equilibrium from trace ``delta1`` and determinant ``delta2``.

    Borderline cases are resolved inside a band of half-width ``tol``: a
    vanishing determinant gives ``NON_HYPERBOLIC`` (``DEGENERATE_NODE`` if the
    trace is nonzero), a vanishing discriminant with positive determinant
    gives ``DEGENERATE_NODE``.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if delta2 < -tol:
        return Kind.SADDLE
    if delta2 <= tol:
        return Kind.DEGENERATE_NODE if abs(delta1) > tol else Kind.NON_HYPERBOLIC
    if abs(delta1) <= tol:
        return Kind.CENTER
    disc = delta1 * delta1 - 4.0 * delta2
    if abs(disc) <= tol:
        return Kind.DEGENERATE_NODE
    if delta1 < 0.0:
        return Kind.STABLE_NODE if disc > 0.0 else Kind.STABLE_SPIRAL
    return Kind.UNSTABLE_NODE if disc > 0.0 else Kind.UNSTABLE_SPIRAL


def equilibrium_locations(p: EfParams) -> list[tuple[PointIndex, float, float]]:
    pts = [(PointIndex.P0, 0.0, 0.0),
           (PointIndex.P1, -1.0, 0.0),
           (PointIndex.P2, 0.0, (p.lam + 1.0) / p.alpha)]
    if p.n != 1.0:
        pts.append((PointIndex.P3, -p.lam / (p.n - 1.0),
                    (p.lam - p.n + 1.0) / (p.alpha * (1.0 - p.n))))
    return pts


def fixed_points(p: EfParams, tol: float = DEFAULT_TOL) -> Equilibria:
    """All equilibria with their Jacobian invariants and linear type.

    P3 is absent when ``n == 1`` (``p3_defined`` is then False). Points
    closer than ``COINCIDENCE_DIST`` are all kept and cross-referenced in
    ``coincident_with``.
    """
    locs = equilibrium_locations(p)
    points = []
    for idx, u, v in locs:
        d1, d2, disc = trace_det(p, SystemState(u, v))
        others = tuple(j for j, uu, vv in locs
                       if j is not idx and math.hypot(u - uu, v - vv) < COINCIDENCE_DIST)
        points.append(EquilibriumPoint(idx, u, v, d1, d2, disc, classify(d1, d2, tol), others))
    return Equilibria(points, p3_defined=p.n != 1.0)


def table1(p: EfParams) -> dict[PointIndex, tuple[float, float, float]]:
    """Closed-form ``(delta1, delta2, discriminant)`` at each equilibrium."""
    lam, n = p.lam, p.n
    out = {
        PointIndex.P0: (lam, -(1.0 + lam), (lam + 2.0) ** 2),
        PointIndex.P1: (2.0 - n + lam, 1.0 - n + lam, (n - lam) ** 2),
        PointIndex.P2: (-1.0, -lam * (1.0 + lam), (1.0 + 2.0 * lam) ** 2),
    }
    if n != 1.0:
        out[PointIndex.P3] = (
            (1.0 - n + 2.0 * lam) / (n - 1.0),
            (-1.0 + n - lam) * lam / (n - 1.0),
            (1.0 + n * (-2.0 + n - 4.0 * n * lam + 4.0 * lam * (1.0 + lam))) / (n - 1.0) ** 2,
        )
    return out


def rosenau_status(p: EfParams, tol: float = DEFAULT_TOL) -> RosenauStatus:
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    return RosenauStatus(first=abs(p.n - (2.0 * p.lam + 1.0)) <= tol,
                         second=abs(p.n - (p.lam - 1.0)) <= tol,
                         tolerance=tol)


def center_condition(p: EfParams, tol: float = DEFAULT_TOL) -> CenterCondition:
    """Whether P3 can be a center.

    The trace at P3 vanishes exactly on ``n = 2 lambda + 1`` (necessary);
    the determinant is then ``lambda / 2``, positive iff ``n > 1``
    (sufficient).
    """
    necessary = rosenau_status(p, tol).first
    return CenterCondition(necessary=necessary, sufficient=necessary and p.n > 1.0 + tol)
