"""Scalar special functions: log-gamma and Bessel J of real order.

Everything else in the package funnels its gamma factors and Bessel
evaluations through this module, so the argument ranges are narrow by
construction: positive gamma arguments and moderate Bessel arguments
(the small-angle asymptotics only ever produce z of order one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

from .errors import DomainError, TruncationError

__all__ = ["Tolerance", "log_gamma", "bessel_j"]


@dataclass(frozen=True)
class Tolerance:
    """Stopping control for truncated series and adaptive schemes."""

    rel: float = 1e-12
    abs: float = 0.0
    max_terms: int = 500

    def __post_init__(self):
        if not (self.rel > 0.0 and math.isfinite(self.rel)):
            raise ValueError("rel must be positive and finite")
        if self.abs < 0.0:
            raise ValueError("abs must be non-negative")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0.

    Backed by the platform's lgamma, which is a fixed rational
    approximation accurate to ~1e-15 relative on the whole range needed
    here (no reflection required: all callers pass positive arguments).
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires finite x > 0, got {x}")
    return math.lgamma(x)


def bessel_j(nu: float, z: float, tol: Tolerance = Tolerance()) -> float:
    """Bessel function of the first kind J_nu(z) by the ascending series.

    Sum over m of (-1)^m (z/2)^(2m+nu) / (m! Gamma(m+nu+1)), truncated
    once the next term falls below ``tol`` relative to the partial sum.
    Intended for nu > -1 and moderate arguments (z <= 60); no asymptotic
    branch is provided.
    """
    nu = float(nu)
    z = float(z)
    if not math.isfinite(z) or z < 0.0:
        raise DomainError(f"bessel_j requires finite z >= 0, got {z}")
    if not nu > -1.0:
        raise DomainError(f"bessel_j requires nu > -1, got {nu}")

    if z == 0.0:
        if nu == 0.0:
            return 1.0
        return 0.0 if nu > 0.0 else math.inf
    if z > 8.0:
        # alternating terms reach (z/2)^(2m)/(m!)^2 before they shrink, so
        # float64 cancels; rerun the same series with enough guard digits
        return _bessel_j_highprec(nu, z, tol)

    # leading term (z/2)^nu / Gamma(nu+1), in log space to dodge tiny z^nu
    half = 0.5 * z
    term = math.exp(nu * math.log(half) - log_gamma(nu + 1.0))
    total = term
    ratio_base = -half * half
    for m in range(1, tol.max_terms + 1):
        term *= ratio_base / (m * (m + nu))
        total += term
        if abs(term) <= tol.rel * abs(total) + tol.abs:
            return total
    raise TruncationError(
        f"bessel_j({nu}, {z}) did not converge in {tol.max_terms} terms"
    )


def _bessel_j_highprec(nu: float, z: float, tol: Tolerance) -> float:
    with localcontext() as ctx:
        ctx.prec = 40 + int(z)
        half2 = (Decimal(z) / 2) ** 2
        term = Decimal(math.exp(nu * math.log(0.5 * z) - log_gamma(nu + 1.0)))
        total = term
        nu_d = Decimal(nu)
        stop = Decimal(tol.rel)
        for m in range(1, tol.max_terms + 1):
            term *= -half2 / (Decimal(m) * (Decimal(m) + nu_d))
            total += term
            if m > 0.5 * z and abs(term) <= stop * abs(total) + Decimal(tol.abs):
                return float(total)
    raise TruncationError(
        f"bessel_j({nu}, {z}) did not converge in {tol.max_terms} terms"
    )
