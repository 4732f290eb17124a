"""Evaluation of the Jacobi trigonometric orthonormal families.

Five families are covered: the trigonometric polynomials on (0, pi),
the trigonometric functions (polynomials damped by the half-angle
weight), the sine-prefactored Q polynomials, and the two symmetrized
systems on (-pi, pi).  Evaluators accept scalars or numpy arrays in the
angle argument and run a forward three-term recurrence in the degree,
which is stable in the oscillatory regime and O(k) per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError
from .specfun import log_gamma

__all__ = [
    "JacobiParams",
    "BasisFamily",
    "BasisSpec",
    "MultiIndex",
    "normalizing_const",
    "normalizing_const_table",
    "jacobi_poly",
    "jacobi_table",
    "trig_poly",
    "trig_poly_table",
    "trig_poly_deriv",
    "trig_fun",
    "trig_fun_table",
    "q_poly",
    "q_poly_table",
    "sym_trig_poly",
    "sym_trig_fun",
    "eigenvalue",
    "operator_apply_fd",
    "tensor_eval",
    "family_table",
    "envelope_exponent",
]


@dataclass(frozen=True)
class JacobiParams:
    """Type parameters (alpha, beta), both > -1."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1.0 and self.beta > -1.0):
            raise DomainError(
                f"type parameters must exceed -1, got ({self.alpha}, {self.beta})"
            )

    @property
    def eta(self) -> float:
        return 0.5 * (self.alpha + self.beta + 1.0)

    def shifted(self, da: int = 1, db: int = 1) -> "JacobiParams":
        return JacobiParams(self.alpha + da, self.beta + db)

    def swapped(self) -> "JacobiParams":
        return JacobiParams(self.beta, self.alpha)


class BasisFamily(Enum):
    TRIG_POLY = "trig-poly"
    TRIG_FUN = "trig-fun"
    SYM_TRIG_POLY = "sym-trig-poly"
    SYM_TRIG_FUN = "sym-trig-fun"
    Q_POLY = "q-poly"

    @property
    def symmetrized(self) -> bool:
        return self in (BasisFamily.SYM_TRIG_POLY, BasisFamily.SYM_TRIG_FUN)

    @property
    def needs_bounded_params(self) -> bool:
        # function families leave L^infinity below alpha, beta = -1/2
        return self in (BasisFamily.TRIG_FUN, BasisFamily.SYM_TRIG_FUN)


@dataclass(frozen=True)
class BasisSpec:
    """A d-dimensional tensor basis: family plus per-axis parameters."""

    d: int
    params: tuple
    family: BasisFamily

    def __init__(self, d: int, params: Sequence[JacobiParams] | JacobiParams,
                 family: BasisFamily):
        if isinstance(params, JacobiParams):
            params = (params,) * d
        params = tuple(params)
        if d < 1:
            raise ValueError("dimension must be positive")
        if len(params) != d:
            raise ValueError(f"expected {d} parameter pairs, got {len(params)}")
        if family.needs_bounded_params:
            for p in params:
                if p.alpha < -0.5 or p.beta < -0.5:
                    raise DomainError(
                        "function families require alpha, beta >= -1/2 "
                        f"(got {p})"
                    )
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "family", family)

    @property
    def domain(self) -> tuple:
        lo = -math.pi if self.family.symmetrized else 0.0
        return (lo, math.pi)


@dataclass(frozen=True)
class MultiIndex:
    """Non-negative integer multi-index with |n| = n_1 + ... + n_d."""

    n: tuple

    def __init__(self, n: Sequence[int]):
        n = tuple(int(v) for v in n)
        if any(v < 0 for v in n):
            raise ValueError(f"multi-index entries must be >= 0, got {n}")
        object.__setattr__(self, "n", n)

    def __len__(self):
        return len(self.n)

    def __iter__(self):
        return iter(self.n)

    @property
    def length(self) -> int:
        return sum(self.n)


def _check_angle(theta, lo: float, hi: float, what: str):
    t = np.asarray(theta, dtype=float)
    if np.any(t < lo - 1e-15) or np.any(t > hi + 1e-15):
        raise DomainError(f"{what} requires angles in [{lo}, {hi}]")
    return t


# ---------------------------------------------------------------------------
# normalizing constants and eigenvalues


def normalizing_const(k: int, p: JacobiParams) -> float:
    """Orthonormalization constant of the degree-k trigonometric polynomial.

    Computed in log space so it stays finite up to k ~ 1e6.  For k = 0 the
    leading factor (2k+alpha+beta+1) Gamma(k+alpha+beta+1) is taken in its
    continuous form Gamma(alpha+beta+2), which also covers alpha+beta = -1.
    """
    if k < 0:
        raise DomainError("degree k must be >= 0")
    a, b = p.alpha, p.beta
    if k == 0:
        log_num = log_gamma(a + b + 2.0)
    else:
        log_num = math.log(2.0 * k + a + b + 1.0) + log_gamma(k + a + b + 1.0)
    log_num += log_gamma(k + 1.0)
    log_den = log_gamma(k + a + 1.0) + log_gamma(k + b + 1.0)
    return math.exp(0.5 * (log_num - log_den))


@lru_cache(maxsize=64)
def _const_table_cached(kmax: int, alpha: float, beta: float) -> np.ndarray:
    p = JacobiParams(alpha, beta)
    table = np.array([normalizing_const(k, p) for k in range(kmax + 1)])
    table.flags.writeable = False
    return table


def normalizing_const_table(kmax: int, p: JacobiParams) -> np.ndarray:
    """Read-only array of normalizing constants for k = 0..kmax."""
    return _const_table_cached(int(kmax), p.alpha, p.beta)


def eigenvalue(k: int, p: JacobiParams) -> float:
    """Eigenvalue (k + eta)^2 shared by the polynomial and function systems."""
    if k < 0:
        raise DomainError("degree k must be >= 0")
    return (k + p.eta) ** 2


# ---------------------------------------------------------------------------
# Jacobi polynomials by forward recurrence


def jacobi_table(kmax: int, p: JacobiParams, x) -> np.ndarray:
    """Values P_k(x) for all k = 0..kmax; shape (kmax+1,) + x.shape.

    Forward degree recurrence with the k = 0, 1 rows seeded from the
    standard explicit forms.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-15):
        raise DomainError("jacobi polynomials take arguments in [-1, 1]")
    a, b = p.alpha, p.beta
    out = np.empty((kmax + 1,) + x.shape, dtype=float)
    out[0] = 1.0
    if kmax == 0:
        return out
    out[1] = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0)
    for k in range(2, kmax + 1):
        s = 2.0 * k + a + b
        c0 = 2.0 * k * (k + a + b) * (s - 2.0)
        c1 = (s - 1.0) * (a * a - b * b)
        c2 = (s - 1.0) * s * (s - 2.0)
        c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s
        out[k] = ((c1 + c2 * x) * out[k - 1] - c3 * out[k - 2]) / c0
    return out


def jacobi_poly(k: int, p: JacobiParams, x) -> float | np.ndarray:
    """Classical Jacobi polynomial P_k^{(alpha,beta)} at x in [-1, 1]."""
    if k < 0:
        raise DomainError("degree k must be >= 0")
    table = jacobi_table(k, p, x)
    value = table[k]
    return float(value) if value.ndim == 0 else value


# ---------------------------------------------------------------------------
# the five families


def trig_poly_table(kmax: int, p: JacobiParams, theta) -> np.ndarray:
    """Orthonormal trigonometric polynomials, all degrees up to kmax."""
    t = _check_angle(theta, 0.0, math.pi, "trig_poly")
    table = jacobi_table(kmax, p, np.cos(t))
    consts = normalizing_const_table(kmax, p)
    return table * consts.reshape((kmax + 1,) + (1,) * t.ndim)


def trig_poly(k: int, p: JacobiParams, theta) -> float | np.ndarray:
    """Trigonometric Jacobi polynomial: normalized P_k at x = cos(theta)."""
    if k < 0:
        raise DomainError("degree k must be >= 0")
    value = trig_poly_table(k, p, theta)[k]
    return float(value) if value.ndim == 0 else value


def trig_poly_deriv(k: int, p: JacobiParams, theta) -> float | np.ndarray:
    """d/dtheta of trig_poly via the degree-lowering differentiation formula.

    Equals -(1/2) sqrt(k (k+2 eta)) * trig_poly(k-1, shifted params) * sin(theta),
    with the degree -1 polynomial taken as zero.
    """
    if k < 0:
        raise DomainError("degree k must be >= 0")
    t = _check_angle(theta, 0.0, math.pi, "trig_poly_deriv")
    if k == 0:
        z = np.zeros_like(t)
        return float(z) if z.ndim == 0 else z
    factor = -0.5 * math.sqrt(k * (k + 2.0 * p.eta))
    value = factor * trig_poly(k - 1, p.shifted(), t) * np.sin(t)
    return float(value) if np.ndim(value) == 0 else value


def _half_angle_weight(p: JacobiParams, t: np.ndarray, half: bool) -> np.ndarray:
    """(sin t/2)^e_a (cos t/2)^e_b with e = alpha,beta + 1/2 (half=True) or
    2 alpha + 1, 2 beta + 1 (half=False, the density of the mu measure)."""
    ea = p.alpha + 0.5 if half else 2.0 * p.alpha + 1.0
    eb = p.beta + 0.5 if half else 2.0 * p.beta + 1.0
    with np.errstate(divide="ignore"):
        return np.power(np.sin(0.5 * t), ea) * np.power(np.cos(0.5 * t), eb)


def trig_fun_table(kmax: int, p: JacobiParams, theta) -> np.ndarray:
    t = _check_angle(theta, 0.0, math.pi, "trig_fun")
    return trig_poly_table(kmax, p, t) * _half_angle_weight(p, t, half=True)


def trig_fun(k: int, p: JacobiParams, theta) -> float | np.ndarray:
    """Trigonometric Jacobi function: trig_poly times the half-angle weight."""
    if k < 0:
        raise DomainError("degree k must be >= 0")
    value = trig_fun_table(k, p, theta)[k]
    return float(value) if value.ndim == 0 else value


def q_poly_table(kmax: int, p: JacobiParams, theta) -> np.ndarray:
    t = _check_angle(theta, 0.0, math.pi, "q_poly")
    return trig_poly_table(kmax, p.shifted(), t) * (0.5 * np.sin(t))


def q_poly(k: int, p: JacobiParams, theta) -> float | np.ndarray:
    """Sine-prefactored system (sin(theta)/2) * trig_poly at shifted parameters.

    Orthonormal under the same mu measure as the unshifted polynomials.
    """
    if k < 0:
        raise DomainError("degree k must be >= 0")
    value = q_poly_table(k, p, theta)[k]
    return float(value) if value.ndim == 0 else value


def q_poly_deriv(k: int, p: JacobiParams, theta) -> float | np.ndarray:
    """d/dtheta of q_poly by the product rule."""
    t = _check_angle(theta, 0.0, math.pi, "q_poly_deriv")
    ps = p.shifted()
    value = 0.5 * np.cos(t) * trig_poly(k, ps, t) + 0.5 * np.sin(t) * trig_poly_deriv(k, ps, t)
    return float(value) if np.ndim(value) == 0 else value


_SQRT_HALF = math.sqrt(0.5)


def sym_trig_poly(k: int, p: JacobiParams, theta) -> float | np.ndarray:
    """Symmetrized trigonometric polynomial on (-pi, pi).

    Even k reduce to the half-interval polynomial of degree k/2 in |theta|;
    odd k carry the odd prefactor sin(theta)/2 and shifted parameters.
    """
    if k < 0:
        raise DomainError("degree k must be >= 0")
    t = _check_angle(theta, -math.pi, math.pi, "sym_trig_poly")
    at = np.abs(t)
    if k % 2 == 0:
        value = _SQRT_HALF * trig_poly(k // 2, p, at)
    else:
        value = _SQRT_HALF * 0.5 * np.sin(t) * trig_poly(k // 2, p.shifted(), at)
    return float(value) if np.ndim(value) == 0 else value


def sym_trig_fun(k: int, p: JacobiParams, theta) -> float | np.ndarray:
    """Symmetrized trigonometric function on (-pi, pi).

    Odd k take the sign of theta; at theta = 0 this evaluates to 0
    (sgn(0) = 0), a single-point convention of no measure-theoretic weight.
    """
    if k < 0:
        raise DomainError("degree k must be >= 0")
    t = _check_angle(theta, -math.pi, math.pi, "sym_trig_fun")
    at = np.abs(t)
    if k % 2 == 0:
        value = _SQRT_HALF * trig_fun(k // 2, p, at)
    else:
        value = _SQRT_HALF * np.sign(t) * trig_fun(k // 2, p.shifted(), at)
    return float(value) if np.ndim(value) == 0 else value


# ---------------------------------------------------------------------------
# dispatch helpers used by quadrature/expansion/kernels


def family_table(family: BasisFamily, kmax: int, p: JacobiParams, theta) -> np.ndarray:
    """Values of basis members 0..kmax of a one-dimensional family."""
    if family is BasisFamily.TRIG_POLY:
        return trig_poly_table(kmax, p, theta)
    if family is BasisFamily.TRIG_FUN:
        return trig_fun_table(kmax, p, theta)
    if family is BasisFamily.Q_POLY:
        return q_poly_table(kmax, p, theta)
    t = _check_angle(theta, -math.pi, math.pi, "family_table")
    at = np.abs(t)
    half = kmax // 2
    sgn = np.sign(t)
    if family is BasisFamily.SYM_TRIG_POLY:
        even = trig_poly_table(half, p, at)
        odd = 0.5 * np.sin(t) * trig_poly_table(half, p.shifted(), at)
    elif family is BasisFamily.SYM_TRIG_FUN:
        even = trig_fun_table(half, p, at)
        odd = sgn * trig_fun_table(half, p.shifted(), at)
    else:
        raise ValueError(f"unknown family {family}")
    out = np.empty((kmax + 1,) + t.shape, dtype=float)
    for k in range(kmax + 1):
        out[k] = _SQRT_HALF * (even[k // 2] if k % 2 == 0 else odd[k // 2])
    return out


def envelope_exponent(family: BasisFamily, p: JacobiParams) -> float:
    """Growth exponent s with sup |basis_k| <~ (k+1)^s over the family."""
    m = max(p.alpha, p.beta, -0.5)
    if family is BasisFamily.TRIG_POLY:
        return m + 0.5
    if family is BasisFamily.TRIG_FUN:
        return 0.0
    if family is BasisFamily.Q_POLY:
        return m + 0.5
    if family is BasisFamily.SYM_TRIG_POLY:
        return m + 0.5
    if family is BasisFamily.SYM_TRIG_FUN:
        return 0.0
    raise ValueError(f"unknown family {family}")


# ---------------------------------------------------------------------------
# differential operators by finite differences


def operator_apply_fd(family: str, k: int, p: JacobiParams, theta: float,
                      h: float = 1e-4) -> float:
    """Apply the family's second-order operator with a central FD stencil.

    ``family`` is "poly" for the drift-form operator acting on the
    trigonometric polynomials (first-order term taken from the analytic
    derivative) and "fun" for the Schroedinger-form operator with the
    half-angle potential acting on the trigonometric functions.
    """
    if h <= 0.0:
        raise DomainError("stencil width h must be positive")
    if not (h < theta < math.pi - h):
        raise DomainError("theta must keep the stencil inside (0, pi)")
    if family == "poly":
        f = lambda t: trig_poly(k, p, t)
        second = (f(theta + h) - 2.0 * f(theta) + f(theta - h)) / (h * h)
        drift = (p.alpha - p.beta + 2.0 * p.eta * math.cos(theta)) / math.sin(theta)
        first = trig_poly_deriv(k, p, theta)
        return -second - drift * first + p.eta**2 * f(theta)
    if family == "fun":
        g = lambda t: trig_fun(k, p, t)
        second = (g(theta + h) - 2.0 * g(theta) + g(theta - h)) / (h * h)
        s2 = math.sin(0.5 * theta) ** 2
        c2 = math.cos(0.5 * theta) ** 2
        potential = (p.alpha**2 - 0.25) / (4.0 * s2) + (p.beta**2 - 0.25) / (4.0 * c2)
        return -second + potential * g(theta)
    raise ValueError("family must be 'poly' or 'fun'")


# ---------------------------------------------------------------------------
# tensor products


def tensor_eval(spec: BasisSpec, n: MultiIndex | Sequence[int], theta) -> float:
    """Product over axes of the one-dimensional family evaluations."""
    idx = n if isinstance(n, MultiIndex) else MultiIndex(n)
    point = np.atleast_1d(np.asarray(theta, dtype=float))
    if len(idx) != spec.d or point.shape[-1] != spec.d:
        raise ValueError(
            f"dimension mismatch: spec.d={spec.d}, |n|-len={len(idx)}, "
            f"point length {point.shape[-1]}"
        )
    value = 1.0
    for axis, (k, p) in enumerate(zip(idx, spec.params)):
        value = value * _family_scalar(spec.family, k, p, point[..., axis])
    return float(value) if np.ndim(value) == 0 else value


def _family_scalar(family: BasisFamily, k: int, p: JacobiParams, theta):
    if family is BasisFamily.TRIG_POLY:
        return trig_poly(k, p, theta)
    if family is BasisFamily.TRIG_FUN:
        return trig_fun(k, p, theta)
    if family is BasisFamily.Q_POLY:
        return q_poly(k, p, theta)
    if family is BasisFamily.SYM_TRIG_POLY:
        return sym_trig_poly(k, p, theta)
    if family is BasisFamily.SYM_TRIG_FUN:
        return sym_trig_fun(k, p, theta)
    raise ValueError(f"unknown family {family}")
