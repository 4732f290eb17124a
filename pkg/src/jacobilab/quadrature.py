"""Integration against the measures of the Jacobi systems.

Provides Gauss-Jacobi rules (Golub-Welsch construction) for the weight
(1-x)^alpha (1+x)^beta on (-1, 1), their pullbacks to the half-angle
measure on (0, pi), and an adaptive Gauss-Legendre integrator whose
endpoint panels absorb the algebraic weight singularity by a power
substitution, so that atoms with breakpoints at scale 1/K near 0 remain
integrable to full accuracy even for alpha < -1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betainc

from .bases import JacobiParams
from .errors import AccuracyError, DomainError
from .specfun import Tolerance, log_gamma

__all__ = [
    "MeasureKind",
    "MeasureTag",
    "QuadratureRule",
    "gauss_jacobi_rule",
    "mu_rule",
    "weighted_lebesgue_nodes",
    "ladder_edges",
    "power_panel_nodes",
    "integrate_mu",
    "integrate_lebesgue",
    "integrate_mu_tilde",
    "interval_mass",
    "rho_total_mass",
    "mu_total_mass",
]

DEFAULT_TOL = Tolerance(rel=1e-10, abs=1e-14, max_terms=500)
MAX_TOTAL_NODES = 2**16


class MeasureKind(Enum):
    RHO = "rho"
    MU = "mu"
    MU_TILDE = "mu_tilde"
    LEBESGUE = "lebesgue"


def rho_total_mass(p: JacobiParams) -> float:
    """Integral of (1-x)^alpha (1+x)^beta over (-1, 1)."""
    a, b = p.alpha, p.beta
    return math.exp(
        (a + b + 1.0) * math.log(2.0)
        + log_gamma(a + 1.0) + log_gamma(b + 1.0) - log_gamma(a + b + 2.0)
    )


def mu_total_mass(p: JacobiParams) -> float:
    """Half-angle measure of (0, pi); equals Beta(alpha+1, beta+1)."""
    return rho_total_mass(p) * 2.0 ** (-(p.alpha + p.beta + 1.0))


@dataclass(frozen=True)
class MeasureTag:
    """Which measure an object integrates against.

    ``params`` is required except for Lebesgue measure; ``interval``
    defaults to the canonical domain of the kind.
    """

    kind: MeasureKind
    params: JacobiParams | None = None
    interval: tuple | None = None

    def __post_init__(self):
        if self.kind is not MeasureKind.LEBESGUE and self.params is None:
            raise ValueError(f"{self.kind} requires Jacobi parameters")
        if self.interval is None:
            canonical = {
                MeasureKind.RHO: (-1.0, 1.0),
                MeasureKind.MU: (0.0, math.pi),
                MeasureKind.MU_TILDE: (-math.pi, math.pi),
                MeasureKind.LEBESGUE: (0.0, math.pi),
            }[self.kind]
            object.__setattr__(self, "interval", canonical)

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind is MeasureKind.LEBESGUE:
            return np.ones_like(x)
        a, b = self.params.alpha, self.params.beta
        with np.errstate(divide="ignore"):
            if self.kind is MeasureKind.RHO:
                return np.power(1.0 - x, a) * np.power(1.0 + x, b)
            if self.kind is MeasureKind.MU:
                return np.power(np.sin(0.5 * x), 2 * a + 1) * np.power(np.cos(0.5 * x), 2 * b + 1)
            return np.power(np.abs(np.sin(0.5 * x)), 2 * a + 1) * np.power(np.cos(0.5 * x), 2 * b + 1)

    def total_mass(self) -> float:
        lo, hi = self.interval
        if self.kind is MeasureKind.LEBESGUE:
            return hi - lo
        if self.kind is MeasureKind.RHO:
            return rho_total_mass(self.params)
        if self.kind is MeasureKind.MU:
            return mu_total_mass(self.params)
        return 2.0 * mu_total_mass(self.params)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights realizing a measure, with recorded polynomial exactness."""

    nodes: np.ndarray
    weights: np.ndarray
    measure: MeasureTag
    exactness_degree: int

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(weights <= 0.0):
            raise ValueError("quadrature weights must be positive")
        total = self.measure.total_mass()
        if abs(weights.sum() - total) > 1e-12 * abs(total):
            raise ValueError(
                f"weights sum {weights.sum():.17g} differs from measure mass {total:.17g}"
            )
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def apply(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@lru_cache(maxsize=256)
def _jacobi_rule_arrays(m: int, alpha: float, beta: float):
    a, b = alpha, beta
    diag = np.empty(m)
    diag[0] = (b - a) / (a + b + 2.0)
    k = np.arange(1, m, dtype=float)
    if m > 1:
        diag[1:] = (b * b - a * a) / ((2 * k + a + b) * (2 * k + a + b + 2.0))
        sq = np.empty(m - 1)
        sq[0] = 4.0 * (a + 1.0) * (b + 1.0) / ((a + b + 2.0) ** 2 * (a + b + 3.0))
        if m > 2:
            kk = k[1:]
            sq[1:] = (
                4.0 * kk * (kk + a) * (kk + b) * (kk + a + b)
                / ((2 * kk + a + b) ** 2 * (2 * kk + a + b + 1.0) * (2 * kk + a + b - 1.0))
            )
        off = np.sqrt(sq)
    else:
        off = np.empty(0)
    vals, vecs = eigh_tridiagonal(diag, off)
    mu0 = rho_total_mass(JacobiParams(a, b))
    weights = mu0 * vecs[0, :] ** 2
    return vals, weights


def gauss_jacobi_rule(m: int, p: JacobiParams) -> QuadratureRule:
    """m-node Gauss rule for the weight (1-x)^alpha (1+x)^beta on (-1, 1).

    Built from the symmetric tridiagonal eigenproblem of the monic
    recurrence coefficients; exact for polynomials of degree <= 2m-1.
    """
    if m < 1:
        raise ValueError("node count m must be positive")
    nodes, weights = _jacobi_rule_arrays(m, p.alpha, p.beta)
    return QuadratureRule(
        nodes=nodes.copy(), weights=weights.copy(),
        measure=MeasureTag(MeasureKind.RHO, p), exactness_degree=2 * m - 1,
    )


def mu_rule(m: int, p: JacobiParams) -> QuadratureRule:
    """Pullback of the Gauss-Jacobi rule to (0, pi) with the mu measure.

    Exact for integrands that are polynomials of degree <= 2m-1 in cos(theta).
    """
    rule = gauss_jacobi_rule(m, p)
    theta = np.arccos(rule.nodes)[::-1]
    weights = rule.weights[::-1] * 2.0 ** (-(p.alpha + p.beta + 1.0))
    return QuadratureRule(
        nodes=theta, weights=weights,
        measure=MeasureTag(MeasureKind.MU, p), exactness_degree=2 * m - 1,
    )


def weighted_lebesgue_nodes(m: int, p: JacobiParams):
    """Nodes/weights integrating f dtheta exactly whenever f equals the
    mu density times a polynomial of degree <= 2m-1 in cos(theta).

    Not a QuadratureRule (its weights do not sum to pi); used for Gram
    matrices of the function families, whose products are of that form.
    """
    rule = mu_rule(m, p)
    tag = MeasureTag(MeasureKind.MU, p)
    return rule.nodes, rule.weights / tag.density(rule.nodes)


# ---------------------------------------------------------------------------
# adaptive weighted integration with endpoint substitutions


@lru_cache(maxsize=16)
def _gl01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


LADDER_SEED = 2e-6
LADDER_RATIO = 4.0


def ladder_edges(width: float, seed: float = LADDER_SEED,
                 ratio: float = LADDER_RATIO) -> np.ndarray:
    """Geometrically graded edges [0, t, ratio t, ..., width].

    The innermost panel (0, t) is meant for the power substitution: with t
    of order ``seed`` the analytic deviation of the weight from a pure
    power is O(t^2), far below every tolerance used here, while the outer
    panels keep a bounded width ratio so plain Gauss-Legendre converges
    geometrically on each.
    """
    if width <= seed * ratio:
        return np.array([0.0, width])
    edges = [width]
    while edges[-1] / ratio > seed:
        edges.append(edges[-1] / ratio)
    edges.append(0.0)
    return np.array(edges[::-1])


def power_panel_nodes(t: float, s: float, n: int):
    """Nodes/jacobian weights on (0, t) under xi = t v^{1/(s+1)}.

    Absorbs an integrand factor xi^s: the caller's weight evaluated at the
    returned nodes times these weights stays bounded.
    """
    v, w = _gl01(n)
    q = 1.0 / (s + 1.0)
    xi = t * v**q
    return xi, w * t * q * v ** (q - 1.0)


def _adaptive(integrand, a: float, b: float, tol: Tolerance,
              s_left: float = 0.0, base_nodes: int = 24) -> float:
    """Integrate a vectorized integrand over (a, b).

    ``s_left`` declares algebraic behaviour (theta-a)^s at the left
    endpoint; that end is covered by a substituted seed panel plus a
    graded ladder, and the remaining smooth panels refine by bisection.
    """
    if not a < b:
        if a == b:
            return 0.0
        raise DomainError(f"empty interval ({a}, {b})")
    stack = []
    total = 0.0
    err_total = 0.0
    if s_left != 0.0:
        edges = ladder_edges(b - a)
        xi, w = power_panel_nodes(edges[1], s_left, 2 * base_nodes)
        total += float(np.dot(w, integrand(a + xi)))
        for lo, hi in zip(edges[1:-1], edges[2:]):
            stack.append((a + lo, a + hi))
    else:
        stack.append((a, b))

    nodes_used = 0
    scale = abs(total)
    while stack:
        lo, hi = stack.pop()
        v, gw = _gl01(base_nodes)
        v2, gw2 = _gl01(2 * base_nodes)
        i1 = float(np.dot(gw * (hi - lo), integrand(lo + (hi - lo) * v)))
        i2 = float(np.dot(gw2 * (hi - lo), integrand(lo + (hi - lo) * v2)))
        nodes_used += 3 * base_nodes
        err = abs(i2 - i1)
        scale = max(scale, abs(i2))
        frac = (hi - lo) / (b - a)
        if err <= max(tol.rel * scale, tol.abs) * max(frac, 1e-3) or err <= 1e-16 * scale:
            total += i2
            err_total += err
            continue
        if nodes_used > MAX_TOTAL_NODES:
            rest = i2
            for qlo, qhi in stack:
                tq = qlo + (qhi - qlo) * v
                rest += float(np.dot(gw * (qhi - qlo), integrand(tq)))
            raise AccuracyError(
                f"adaptive integration exceeded {MAX_TOTAL_NODES} nodes on ({a}, {b})",
                estimate=total + rest, error_bound=err_total + err,
            )
        mid = 0.5 * (lo + hi)
        stack.extend([(lo, mid), (mid, hi)])
    return total


def integrate_mu(f, p: JacobiParams, a: float = 0.0, b: float = math.pi,
                 tol: Tolerance = DEFAULT_TOL) -> float:
    """Integral of f against the half-angle measure over (a, b) in (0, pi).

    Endpoint panels at 0 substitute theta = a' + (b'-a') v^{1/(2 alpha+2)}
    so the weight singularity disappears before the nested Gauss-Legendre
    refinement runs.  A panel touching pi is first reflected onto the
    origin (swapping alpha and beta, the mirrored substitution exponent
    1/(2 beta+2)), where the distance to the endpoint is exactly
    representable; evaluating the weight at pi - eps directly would lose
    every significant digit.
    """
    if not (0.0 <= a < b <= math.pi + 1e-15):
        raise DomainError(f"need 0 <= a < b <= pi, got ({a}, {b})")
    if b >= math.pi - 1e-15 and p.beta != -0.5:
        cut = max(a, 0.5 * math.pi)
        flipped = integrate_mu(lambda u: np.asarray(f(math.pi - u), dtype=float),
                               p.swapped(), 0.0, math.pi - cut, tol)
        if cut <= a:
            return flipped
        return flipped + integrate_mu(f, p, a, cut, tol)
    tag = MeasureTag(MeasureKind.MU, p)
    integrand = lambda t: np.asarray(f(t), dtype=float) * tag.density(t)
    s0 = 2.0 * p.alpha + 1.0 if a == 0.0 else 0.0
    return _adaptive(integrand, a, b, tol, s_left=s0)


def integrate_lebesgue(f, a: float, b: float, tol: Tolerance = DEFAULT_TOL,
                       s_left: float = 0.0, s_right: float = 0.0) -> float:
    """Plain integral of f over (a, b), with optional endpoint cusp hints.

    A right-endpoint cusp is reflected onto the origin first so the
    substitution variable stays exactly representable.
    """
    if s_right != 0.0:
        right = _adaptive(lambda u: np.asarray(f(b - u), dtype=float),
                          0.0, 0.5 * (b - a), tol, s_left=s_right)
        left = integrate_lebesgue(f, a, 0.5 * (a + b), tol, s_left=s_left)
        return left + right
    return _adaptive(lambda t: np.asarray(f(t), dtype=float), a, b, tol,
                     s_left=s_left)


def integrate_mu_tilde(f, p: JacobiParams, a: float = -math.pi, b: float = math.pi,
                       tol: Tolerance = DEFAULT_TOL) -> float:
    """Integral against the symmetrized measure on (a, b) in (-pi, pi).

    Folded onto (0, pi): the weight is even, so each half reduces to a mu
    integral of the reflected integrand.
    """
    if not (-math.pi - 1e-15 <= a < b <= math.pi + 1e-15):
        raise DomainError(f"need -pi <= a < b <= pi, got ({a}, {b})")
    total = 0.0
    if b > 0.0:
        total += integrate_mu(f, p, max(a, 0.0), b, tol)
    if a < 0.0:
        total += integrate_mu(lambda t: np.asarray(f(-t), dtype=float),
                              p, max(-b, 0.0), -a, tol)
    return total


def interval_mass(tag: MeasureTag, a: float, b: float,
                  tol: Tolerance = DEFAULT_TOL) -> float:
    """Measure of the interval (a, b) under the tagged measure."""
    lo, hi = tag.interval
    a, b = max(a, lo), min(b, hi)
    if b <= a:
        return 0.0
    if tag.kind is MeasureKind.LEBESGUE:
        return b - a
    if tag.kind is MeasureKind.MU:
        return _mu_interval_mass(tag.params, a, b)
    if tag.kind is MeasureKind.MU_TILDE:
        total = 0.0
        if b > 0.0:
            total += _mu_interval_mass(tag.params, max(a, 0.0), b)
        if a < 0.0:
            total += _mu_interval_mass(tag.params, max(-b, 0.0), -a)
        return total
    return integrate_mu(lambda t: np.ones_like(t), tag.params,
                        math.acos(b), math.acos(a), tol) * 2.0 ** (
                            tag.params.alpha + tag.params.beta + 1.0)


def _mu_interval_mass(p: JacobiParams, a: float, b: float) -> float:
    # regularized incomplete beta in the variable u = sin^2(theta/2)
    total = mu_total_mass(p)
    ua = math.sin(0.5 * a) ** 2
    ub = math.sin(0.5 * b) ** 2
    return total * float(betainc(p.alpha + 1.0, p.beta + 1.0, ub)
                         - betainc(p.alpha + 1.0, p.beta + 1.0, ua))
