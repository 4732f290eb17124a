"""Truncated-series evaluation of the r-weighted and Poisson kernels,
their two-sided estimate ratios, and the L^2 norm profiles that feed the
Hardy-inequality machinery.

Series are truncated from the boundedness envelopes of the basis
families: the tail beyond M is dominated by a geometric times polynomial
envelope, and summation stops once that bound drops below the requested
relative tolerance (hard cap 2e4 terms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammainc

from .bases import (BasisFamily, JacobiParams, envelope_exponent,
                    family_table, q_poly_deriv, trig_poly_deriv,
                    trig_poly_table)
from .errors import AccuracyError, DomainError
from .fitting import GrowthFit, fit_power_model
from .quadrature import mu_rule
from .specfun import Tolerance

__all__ = [
    "KernelSpec",
    "r_kernel",
    "poisson_kernel",
    "kernel_estimate_ratio",
    "kernel_ratio_extremes",
    "kernel_l2_profile",
    "norm_difference_profile",
    "semigroup_defect",
    "poisson_mass_defect",
    "kernel_relation_defect",
    "r_relation_defect",
]

MAX_TERMS = 20_000
DEFAULT_TRUNCATION = Tolerance(rel=1e-12, abs=0.0, max_terms=MAX_TERMS)
MAX_R = 0.999


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel series to sum: family, parameters, and r or t."""

    family: BasisFamily
    params: JacobiParams
    r: float | None = None
    t: float | None = None
    truncation: Tolerance = DEFAULT_TRUNCATION

    def __post_init__(self):
        if (self.r is None) == (self.t is None):
            raise ValueError("provide exactly one of r and t")
        if self.r is not None and not 0.0 < self.r < 1.0:
            raise DomainError("r must lie in (0, 1)")
        if self.t is not None and self.t <= 0.0:
            raise DomainError("t must be positive")
        if self.family.symmetrized and self.t is not None:
            raise DomainError("Poisson weights are defined for the half-interval families")

    @property
    def ratio(self) -> float:
        """Geometric decay rate of the series terms."""
        return self.r if self.r is not None else math.exp(-self.t)

    def weights(self, kmax: int) -> np.ndarray:
        k = np.arange(kmax + 1, dtype=float)
        if self.r is not None:
            return self.r**k
        eta = self.params.eta
        return np.exp(-self.t * np.abs(k + eta))


def _term_count(spec: KernelSpec) -> int:
    """Smallest M whose envelope tail bound clears the relative tolerance."""
    r = spec.ratio
    s = envelope_exponent(spec.family, spec.params)
    power = 2.0 * s + 1.0
    rel = spec.truncation.rel
    log_r = math.log(r)
    m = 16
    while m <= MAX_TERMS:
        # envelope tail ~ r^m (m+1)^power / (1 - r), compared to a unit-scale sum
        log_tail = m * log_r + power * math.log(m + 1.0) - math.log1p(-r)
        if log_tail <= math.log(rel):
            return m
        m = int(m * 1.3) + 8
    raise AccuracyError(
        f"kernel series needs more than {MAX_TERMS} terms at ratio {r}",
        estimate=None,
    )


def _series_at(spec: KernelSpec, theta, phi) -> float:
    """Sum the series at one point, stopping once the envelope bound of the
    next terms falls below the tolerance relative to the running sum."""
    pts = np.array([theta, phi], dtype=float)
    r = spec.ratio
    s = envelope_exponent(spec.family, spec.params)
    power = 2.0 * s + 1.0
    m = 64
    while True:
        table = family_table(spec.family, m, spec.params, pts)
        total = float(np.dot(spec.weights(m), table[:, 0] * table[:, 1]))
        tail = math.exp(m * math.log(r) + power * math.log(m + 1.0)
                        - math.log1p(-r))
        if tail <= spec.truncation.rel * max(abs(total), 1e-300) + spec.truncation.abs:
            return total
        if m >= MAX_TERMS:
            raise AccuracyError(
                f"kernel series did not converge within {MAX_TERMS} terms",
                estimate=total, error_bound=tail,
            )
        m = min(2 * m, MAX_TERMS)


def r_kernel(spec: KernelSpec, theta: float, phi: float) -> float:
    """Kernel sum_k r^k basis_k(theta) basis_k(phi)."""
    if spec.r is None:
        raise DomainError("r_kernel needs an r-type spec")
    if spec.r > MAX_R:
        raise DomainError(f"r capped at {MAX_R}; use the Poisson form for r -> 1")
    return _series_at(spec, theta, phi)


def poisson_kernel(spec: KernelSpec, theta: float, phi: float) -> float:
    """Kernel sum_k exp(-t |k+eta|) basis_k(theta) basis_k(phi).

    The absolute value only matters for k = 0 when alpha + beta < -1; the
    series is summed exactly as written.
    """
    if spec.t is None:
        raise DomainError("poisson_kernel needs a t-type spec")
    if spec.family not in (BasisFamily.TRIG_POLY, BasisFamily.TRIG_FUN):
        raise DomainError("Poisson kernels cover the polynomial and function families")
    return _series_at(spec, theta, phi)


def _poisson_grid(spec: KernelSpec, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Kernel values on a theta x phi grid, one table pass."""
    m = _term_count(spec)
    w = spec.weights(m)
    ta = family_table(spec.family, m, spec.params, np.asarray(thetas, dtype=float))
    tb = family_table(spec.family, m, spec.params, np.asarray(phis, dtype=float))
    return np.einsum("k,ki,kj->ij", w, ta, tb)


# ---------------------------------------------------------------------------
# two-sided estimate ratios


def _comparand(p: JacobiParams, j: int, t: float, theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    first = (t * t + theta**2 + phi**2) ** (-p.alpha - 0.5)
    second = (t * t + (math.pi - theta) ** 2 + (math.pi - phi) ** 2) ** (-p.beta - 0.5)
    third = t / (t * t + (theta - phi) ** 2) ** (1.0 + j / 2.0)
    return first * second * third


def kernel_estimate_ratio(p: JacobiParams, j: int, t: float, theta: float,
                          phi: float, h: float = 1e-5) -> float:
    """|d^j/dtheta^j kernel| divided by its two-sided comparand.

    j = 0 uses the kernel itself; j = 1 a central difference in theta.
    """
    if j not in (0, 1):
        raise DomainError("only j in {0, 1} is supported")
    if not 0.0 < t <= 1.0:
        raise DomainError("the two-sided estimate is stated for 0 < t <= 1")
    spec = KernelSpec(BasisFamily.TRIG_POLY, p, t=t)
    if j == 0:
        value = abs(poisson_kernel(spec, theta, phi))
    else:
        value = abs(poisson_kernel(spec, theta + h, phi)
                    - poisson_kernel(spec, theta - h, phi)) / (2.0 * h)
    return value / float(_comparand(p, j, t, theta, phi))


def kernel_ratio_extremes(p: JacobiParams, j: int = 0,
                          t_count: int = 10, grid: int = 16) -> tuple:
    """(min, max) of the estimate ratio over a t x theta x phi grid."""
    ts = np.linspace(0.1, 1.0, t_count)
    angles = math.pi * (np.arange(grid) + 0.5) / grid
    lo, hi = math.inf, -math.inf
    for t in ts:
        spec = KernelSpec(BasisFamily.TRIG_POLY, p, t=float(t))
        values = np.abs(_poisson_grid(spec, angles, angles))
        if j == 1:
            h = 1e-5
            up = _poisson_grid(replace(spec), angles + h, angles)
            dn = _poisson_grid(replace(spec), angles - h, angles)
            values = np.abs(up - dn) / (2.0 * h)
        comp = _comparand(p, j, float(t), angles[:, None], angles[None, :])
        ratio = values / comp
        lo = min(lo, float(ratio.min()))
        hi = max(hi, float(ratio.max()))
    return lo, hi


# ---------------------------------------------------------------------------
# L^2 norm profiles via Parseval


# At the term cap and r = 1 - 2^-12 the envelope tail fraction is ~1e-2
# for the polynomial family; a tail of that size moves fitted slopes by
# O(1e-3), well inside every slope tolerance used downstream.
PROFILE_TOL = Tolerance(rel=2.5e-2, abs=0.0, max_terms=MAX_TERMS)


def default_profile_grid(pieces: int = 16) -> np.ndarray:
    """Angles dense near both endpoints plus a mid band; the Parseval sup
    lives at scale theta ~ 1-r, so geometric spacing is required."""
    near = math.pi * 2.0 ** -np.arange(1, pieces + 1.0)
    return np.unique(np.concatenate([
        near, math.pi - near, [math.pi / 3, math.pi / 2, 2 * math.pi / 3],
    ]))


def _profile_table(family: BasisFamily, p: JacobiParams, kmax: int,
                   theta: np.ndarray, derivative: bool) -> np.ndarray:
    if not derivative:
        return family_table(family, kmax, p, theta)
    if family is BasisFamily.TRIG_POLY:
        rows = [np.zeros_like(theta)]
        shifted = trig_poly_table(kmax - 1, p.shifted(), theta)
        for k in range(1, kmax + 1):
            rows.append(-0.5 * math.sqrt(k * (k + 2.0 * p.eta))
                        * shifted[k - 1] * np.sin(theta))
        return np.stack(rows)
    if family is BasisFamily.Q_POLY:
        ps = p.shifted()
        base = trig_poly_table(kmax, ps, theta)
        rows = [0.5 * np.cos(theta) * base[0]]
        shifted = trig_poly_table(kmax - 1, ps.shifted(), theta) if kmax >= 1 else None
        for k in range(1, kmax + 1):
            deriv = -0.5 * math.sqrt(k * (k + 2.0 * ps.eta)) * shifted[k - 1] * np.sin(theta)
            rows.append(0.5 * np.cos(theta) * base[k] + 0.5 * np.sin(theta) * deriv)
        return np.stack(rows)
    raise DomainError("derivative profiles cover the polynomial and Q families")


def _tail_fraction(r: float, power: float, m: int) -> float:
    """Envelope tail fraction of sum_k r^{2k} (k+1)^power beyond k = m."""
    lam = -2.0 * math.log(r)
    shape = power + 1.0
    return float(1.0 - gammainc(shape, lam * (m + 1)))


def kernel_l2_profile(spec: KernelSpec, r_grid, theta_grid=None,
                      derivative: bool = False,
                      truncation: Tolerance = PROFILE_TOL) -> GrowthFit:
    """Slope of log sup_theta ||kernel slice||_{L^2} against -log(1-r).

    The slice norm comes from Parseval: the squared norm is the series
    sum_k r^{2k} basis_k(theta)^2 (derivative variant uses the analytic
    theta-derivative of the basis).
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid <= 0.0) or np.any(r_grid >= 1.0):
        raise DomainError("r grid must lie in (0, 1)")
    if theta_grid is None:
        theta_grid = default_profile_grid()
    theta_grid = np.asarray(theta_grid, dtype=float)
    s = envelope_exponent(spec.family, spec.params)
    power = 2.0 * s + 1.0 + (2.0 if derivative else 0.0)
    r_max = float(r_grid.max())
    m = MAX_TERMS
    for cand in (256, 1024, 4096, 8192, MAX_TERMS):
        if _tail_fraction(r_max, power, cand) <= truncation.rel:
            m = cand
            break
    worst = _tail_fraction(r_max, power, m)
    if worst > truncation.rel:
        raise AccuracyError(
            f"profile truncation at {m} terms leaves tail fraction {worst:.2e}",
            estimate=None, error_bound=worst,
        )
    table_sq = _profile_table(spec.family, spec.params, m, theta_grid,
                              derivative) ** 2
    k = np.arange(m + 1, dtype=float)
    values = []
    for r in r_grid:
        sums = (r ** (2.0 * k)) @ table_sq
        values.append(math.sqrt(float(sums.max())))
    x = 1.0 / (1.0 - r_grid)
    return fit_power_model(x, np.asarray(values))


def norm_difference_profile(spec: KernelSpec, theta: float, theta_prime: float,
                            r_grid, truncation: Tolerance = PROFILE_TOL) -> GrowthFit:
    """Dominant (1-r) exponent of ||R_r(theta,.) - R_r(theta',.)||_{L^2}."""
    if spec.family is not BasisFamily.TRIG_FUN:
        raise DomainError("the difference profile is stated for the function family")
    r_grid = np.asarray(r_grid, dtype=float)
    if theta == theta_prime:
        raise DomainError("theta and theta' must differ")
    s = envelope_exponent(spec.family, spec.params)
    power = 2.0 * s + 1.0
    r_max = float(r_grid.max())
    m = MAX_TERMS
    for cand in (256, 1024, 4096, 8192, MAX_TERMS):
        if _tail_fraction(r_max, power, cand) <= truncation.rel:
            m = cand
            break
    pts = np.array([theta, theta_prime])
    table = family_table(spec.family, m, spec.params, pts)
    diff_sq = (table[:, 0] - table[:, 1]) ** 2
    k = np.arange(m + 1, dtype=float)
    values = [math.sqrt(float(np.dot(r ** (2.0 * k), diff_sq))) for r in r_grid]
    return fit_power_model(1.0 / (1.0 - r_grid), np.asarray(values))


# ---------------------------------------------------------------------------
# identity checks


def semigroup_defect(p: JacobiParams, t: float, s: float, theta: float,
                     phi: float, family: BasisFamily = BasisFamily.TRIG_POLY,
                     nodes: int = 96) -> float:
    """| integral of K_t(theta,.) K_s(.,phi) d(measure) - K_{t+s}(theta,phi) |."""
    spec_t = KernelSpec(family, p, t=t)
    spec_s = KernelSpec(family, p, t=s)
    spec_ts = KernelSpec(family, p, t=t + s)
    if family is BasisFamily.TRIG_POLY:
        rule = mu_rule(nodes, p)
        mids, w = rule.nodes, rule.weights
    else:
        from .quadrature import weighted_lebesgue_nodes

        mids, w = weighted_lebesgue_nodes(nodes, p)
    left = _poisson_grid(spec_t, np.array([theta]), mids)[0]
    right = _poisson_grid(spec_s, mids, np.array([phi]))[:, 0]
    composed = float(np.dot(w, left * right))
    return abs(composed - poisson_kernel(spec_ts, theta, phi))


def poisson_mass_defect(p: JacobiParams, t: float, theta: float,
                        nodes: int = 96) -> float:
    """| integral of the polynomial kernel in its second slot - e^{-t eta} |.

    Valid for alpha + beta >= -1, where |0 + eta| = eta.
    """
    if p.alpha + p.beta < -1.0:
        raise DomainError("mass identity requires alpha + beta >= -1")
    spec = KernelSpec(BasisFamily.TRIG_POLY, p, t=t)
    rule = mu_rule(nodes, p)
    total = float(np.dot(rule.weights,
                         _poisson_grid(spec, np.array([theta]), rule.nodes)[0]))
    return abs(total - math.exp(-t * p.eta))


def kernel_relation_defect(p: JacobiParams, t: float, theta: float,
                           phi: float) -> float:
    """Function-kernel vs weighted polynomial-kernel identity residual."""
    spec_f = KernelSpec(BasisFamily.TRIG_FUN, p, t=t)
    spec_p = KernelSpec(BasisFamily.TRIG_POLY, p, t=t)
    weight = ((math.sin(theta / 2.0) * math.sin(phi / 2.0)) ** (p.alpha + 0.5)
              * (math.cos(theta / 2.0) * math.cos(phi / 2.0)) ** (p.beta + 0.5))
    return abs(poisson_kernel(spec_f, theta, phi)
               - weight * poisson_kernel(spec_p, theta, phi))


def r_relation_defect(p: JacobiParams, r: float, theta: float,
                      phi: float) -> float:
    """Residual of R_r = r^{-eta} K_{-log r} (polynomial family).

    Meaningful for alpha + beta >= -1, where the Poisson exponent loses
    its absolute value.
    """
    if p.alpha + p.beta < -1.0:
        raise DomainError("the r-t relation requires alpha + beta >= -1")
    spec_r = KernelSpec(BasisFamily.TRIG_POLY, p, r=r)
    spec_t = KernelSpec(BasisFamily.TRIG_POLY, p, t=-math.log(r))
    return abs(r_kernel(spec_r, theta, phi)
               - r ** (-p.eta) * poisson_kernel(spec_t, theta, phi))
