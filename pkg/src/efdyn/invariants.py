"""First integrals of EF equations and drift measurement along sampled orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError, UnsupportedCaseError
from .model import EfParams
from .numerics import real_power


@dataclass(frozen=True)
class PhysicalState:
    """Point ``(Y, q, dq/dY)`` of a solution curve in physical variables."""

    Y: float
    q: float
    qY: float


@dataclass(frozen=True)
class Drift:
    max_abs_dev: float
    rel_dev: float


def _ratio_power(num: float, den: float, k: float) -> float:
    """``(num/den)**k``, written as ``(den/num)**(-k)`` for negative k so that den = 0 is allowed."""
    if k < 0.0:
        if num == 0.0:
            raise DomainError("singular power: zero numerator with negative exponent")
        return real_power(den / num, -k)
    if den == 0.0:
        raise DomainError("singular power: Y = 0")
    return real_power(num / den, k)


def pseudo_hamiltonian(s: PhysicalState) -> float:
    """``qY**2 + ln q**2``, conserved by ``q q_YY + 1 = 0``."""
    if s.q == 0.0:
        raise DomainError("pseudo_hamiltonian is singular at q = 0")
    return s.qY * s.qY + math.log(s.q * s.q)


def invariant_first(p: EfParams, s: PhysicalState) -> float:
    """Integral for ``n = 2 lambda + 1``.

    ``C = Y qY**2 - q qY - alpha/(lambda+1) * (q**2/Y)**(lambda+1)``.
    The expression can be evaluated for any ``n`` but is only conserved on
    the first integrable line.
    """
    if p.lam == -1.0:
        raise UnsupportedCaseError("no first integral available for lambda = -1")
    return (s.Y * s.qY * s.qY - s.q * s.qY
            - p.alpha / (p.lam + 1.0) * _ratio_power(s.q * s.q, s.Y, p.lam + 1.0))


def invariant_second(p: EfParams, s: PhysicalState) -> float:
    """Integral for ``n = lambda - 1``: ``(q - Y qY)**2 - (2 alpha/lambda)(q/Y)**lambda``."""
    if p.lam == 0.0:
        raise UnsupportedCaseError(
            "lambda = 0: use pseudo_hamiltonian in the transformed variables")
    return ((s.q - s.Y * s.qY) ** 2
            - 2.0 * p.alpha / p.lam * _ratio_power(s.q, s.Y, p.lam))


def ermakov_invariant(s: PhysicalState) -> float:
    """``(qY**2 - q**-2) / 2`` for the zero-frequency Ermakov equation ``q**3 q_YY + 1 = 0``."""
    if s.q == 0.0:
        raise DomainError("ermakov_invariant is singular at q = 0")
    return 0.5 * (s.qY * s.qY - 1.0 / (s.q * s.q))


def ermakov_c_invariant(s: PhysicalState) -> float:
    if s.q == 0.0:
        raise DomainError("ermakov_c_invariant is singular at q = 0")
    return 2.0 * ermakov_invariant(s) * s.Y - s.q * s.qY


def invariant_drift(values: Iterable[float]) -> Drift:
    """Largest deviation from the first value, absolute and relative to ``max(1, |first|)``."""
    values = list(values)
    if not values:
        raise ValueError("invariant_drift needs at least one value")
    first = values[0]
    dev = max(abs(x - first) for x in values)
    return Drift(dev, dev / max(1.0, abs(first)))
