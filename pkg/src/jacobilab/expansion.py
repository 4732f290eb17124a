"""Expansion coefficients, Hardy functionals, Parseval diagnostics,
parity decomposition, and the admissible-exponent arithmetic.

Coefficient integrals run on per-axis panels whose nodes absorb the
measure weight (with the endpoint substitutions from the quadrature
module) and contract against vectorized basis tables, so a full table of
coefficients up to the cutoff costs one recurrence sweep per panel.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .atoms import PiecewiseConstantAtom
from .bases import (BasisFamily, BasisSpec, JacobiParams, family_table,
                    trig_poly_table)
from .errors import AccuracyError, DomainError
from .quadrature import (_gl01, ladder_edges, mu_rule, power_panel_nodes,
                         weighted_lebesgue_nodes)
from .specfun import Tolerance

__all__ = [
    "CoefficientTable",
    "HardyParameters",
    "multi_indices",
    "coefficients",
    "hardy_sum",
    "parseval_defect",
    "l2_norm_sq",
    "parity_components",
    "parity_map",
    "parity_shifted_params",
    "admissible_exponent",
    "polynomial_setting",
    "function_setting",
    "gram_matrix",
]

DEFAULT_COEF_TOL = Tolerance(rel=1e-10, abs=1e-12, max_terms=500)
MULTI_D_CUTOFF_CAP = 128


# ---------------------------------------------------------------------------
# multi-index enumeration: shells of constant |n| ascending, lex inside


def _shell(d: int, s: int):
    if d == 1:
        yield (s,)
        return
    for i in range(s + 1):
        for rest in _shell(d - 1, s - i):
            yield (i,) + rest


def multi_indices(d: int, cutoff: int) -> list:
    """All n with |n| <= cutoff, shell by shell, lexicographic within."""
    out = []
    for s in range(cutoff + 1):
        out.extend(_shell(d, s))
    return out


# ---------------------------------------------------------------------------
# coefficient tables


@dataclass(frozen=True)
class CoefficientTable:
    """Complete map n -> <f, basis_n> over the shells |n| <= cutoff."""

    spec: BasisSpec
    cutoff: int
    entries: dict

    def __post_init__(self):
        expected = multi_indices(self.spec.d, self.cutoff)
        if set(self.entries) != set(expected):
            raise ValueError("entries must cover exactly the shells |n| <= cutoff")

    def __getitem__(self, n) -> float:
        return self.entries[tuple(n)]

    def ordered(self) -> list:
        return [(n, self.entries[n]) for n in multi_indices(self.spec.d, self.cutoff)]

    def vector(self) -> np.ndarray:
        return np.array([v for _, v in self.ordered()])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([f"n{i+1}" for i in range(self.spec.d)] + ["coefficient"])
        for n, v in self.ordered():
            writer.writerow([*n, repr(v)])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "family": self.spec.family.value,
            "d": self.spec.d,
            "params": [[p.alpha, p.beta] for p in self.spec.params],
            "cutoff": self.cutoff,
            "entries": [[list(n), v] for n, v in self.ordered()],
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "CoefficientTable":
        payload = json.loads(text)
        spec = BasisSpec(
            payload["d"],
            [JacobiParams(a, b) for a, b in payload["params"]],
            BasisFamily(payload["family"]),
        )
        entries = {tuple(n): float(v) for n, v in payload["entries"]}
        return CoefficientTable(spec, payload["cutoff"], entries)


# ---------------------------------------------------------------------------
# stable panel quadrature per family

# endpoint exponent of the absorbed weight: integrand ~ gap^s at the endpoint
def _endpoint_exponents(family: BasisFamily, p: JacobiParams):
    a, b = p.alpha, p.beta
    if family in (BasisFamily.TRIG_POLY, BasisFamily.SYM_TRIG_POLY):
        return 2 * a + 1.0, 2 * b + 1.0
    if family is BasisFamily.TRIG_FUN:
        return a + 0.5, b + 0.5
    if family is BasisFamily.Q_POLY:
        return 2 * a + 2.0, 2 * b + 2.0
    if family is BasisFamily.SYM_TRIG_FUN:
        return a + 0.5, b + 0.5
    raise ValueError(f"unknown family {family}")


def _absorbed_weight(family: BasisFamily, p: JacobiParams,
                     sin_half: np.ndarray, cos_half: np.ndarray) -> np.ndarray:
    a, b = p.alpha, p.beta
    if family in (BasisFamily.TRIG_POLY, BasisFamily.SYM_TRIG_POLY):
        return np.abs(sin_half) ** (2 * a + 1) * cos_half ** (2 * b + 1)
    if family is BasisFamily.TRIG_FUN:
        return sin_half ** (a + 0.5) * cos_half ** (b + 0.5)
    if family is BasisFamily.Q_POLY:
        # mu density times sin(theta)/2
        return sin_half ** (2 * a + 2) * cos_half ** (2 * b + 2)
    if family is BasisFamily.SYM_TRIG_FUN:
        return np.ones_like(sin_half)
    raise ValueError(f"unknown family {family}")


@dataclass(frozen=True)
class _Nodes:
    theta: np.ndarray
    weights: np.ndarray  # includes jacobian and absorbed measure weight


def _ladder_gap_nodes(width: float, s: float, n: int):
    """Distance-coordinate nodes covering (0, width) against a xi^s factor:
    a power-substituted seed panel plus graded plain panels."""
    edges = ladder_edges(width)
    xi, jac = power_panel_nodes(edges[1], s, n)
    xis, jacs = [xi], [jac]
    for lo, hi in zip(edges[1:-1], edges[2:]):
        m = n if hi > width / 16.0 else min(n, 24)
        v, gw = _gl01(m)
        xis.append(lo + (hi - lo) * v)
        jacs.append(gw * (hi - lo))
    return np.concatenate(xis), np.concatenate(jacs)


def _panel_nodes(family: BasisFamily, p: JacobiParams, lo: float, hi: float,
                 n: int) -> _Nodes:
    """Nodes and absorbed weights on one panel with stable endpoint handling.

    Panels touching 0 keep theta tiny and exact; panels touching +-pi are
    generated in the gap variable u = pi - |theta| so that half-angle
    factors never suffer cancellation.
    """
    width = hi - lo
    s0, s1 = _endpoint_exponents(family, p)
    sym = family.symmetrized

    def assemble(theta, jac, sin_half, cos_half):
        w = _absorbed_weight(family, p, sin_half, cos_half) * jac
        return _Nodes(theta, w)

    if lo == 0.0 and s0 != 0.0:
        xi, jac = _ladder_gap_nodes(width, s0, n)
        return assemble(xi, jac, np.sin(0.5 * xi), np.cos(0.5 * xi))
    if hi == 0.0 and s0 != 0.0 and sym:
        xi, jac = _ladder_gap_nodes(width, s0, n)
        return assemble(-xi, jac, np.sin(0.5 * xi), np.cos(0.5 * xi))
    if hi >= math.pi - 1e-14 and s1 != 0.0:
        xi, jac = _ladder_gap_nodes(width, s1, n)
        return assemble(math.pi - xi, jac, np.cos(0.5 * xi), np.sin(0.5 * xi))
    if sym and lo <= -math.pi + 1e-14 and s1 != 0.0:
        xi, jac = _ladder_gap_nodes(width, s1, n)
        return assemble(-(math.pi - xi), jac, np.cos(0.5 * xi), np.sin(0.5 * xi))
    v, gw = _gl01(n)
    theta = lo + width * v
    return assemble(theta, gw * width, np.sin(0.5 * theta), np.cos(0.5 * theta))


def _coef_table(family: BasisFamily, p: JacobiParams, kmax: int,
                theta: np.ndarray) -> np.ndarray:
    """Basis table matching the absorbed weights of ``_panel_nodes``."""
    if family in (BasisFamily.TRIG_POLY, BasisFamily.TRIG_FUN):
        return trig_poly_table(kmax, p, theta)
    if family is BasisFamily.Q_POLY:
        return trig_poly_table(kmax, p.shifted(), theta)
    return family_table(family, kmax, p, theta)


def _split_segments(family: BasisFamily, lo: float, hi: float,
                    max_width: float = math.pi / 4) -> list:
    """Cut (lo, hi) at 0 for symmetrized families and into bounded chunks."""
    cuts = [lo, hi]
    if family.symmetrized and lo < 0.0 < hi:
        cuts.insert(1, 0.0)
    out = []
    for a, b in zip(cuts, cuts[1:]):
        pieces = max(1, int(math.ceil((b - a) / max_width)))
        edges = np.linspace(a, b, pieces + 1)
        edges[0], edges[-1] = a, b
        out.extend(zip(edges, edges[1:]))
    return out


def _base_nodes(kmax: int, width: float) -> int:
    # roughly pi nodes per basis oscillation across the panel, plus floor
    return 24 + int(0.6 * kmax * width / math.pi)


def _axis_moments(family: BasisFamily, p: JacobiParams, kmax: int,
                  intervals, factor: int, skip=None) -> np.ndarray:
    """Integrals of every basis member over each interval; (kmax+1, len)."""
    out = np.zeros((kmax + 1, len(intervals)))
    for j, (lo, hi) in enumerate(intervals):
        if skip is not None and skip[j]:
            continue
        for a, b in _split_segments(family, lo, hi):
            nd = _panel_nodes(family, p, a, b, factor * _base_nodes(kmax, b - a))
            table = _coef_table(family, p, kmax, nd.theta)
            out[:, j] += table @ nd.weights
    return out


def _axis_quadrature(family: BasisFamily, p: JacobiParams, lo: float,
                     hi: float, kmax: int, factor: int) -> _Nodes:
    """Concatenated panel nodes covering (lo, hi) for callable integrands."""
    thetas, weights = [], []
    for a, b in _split_segments(family, lo, hi):
        nd = _panel_nodes(family, p, a, b, factor * _base_nodes(kmax, b - a))
        thetas.append(nd.theta)
        weights.append(nd.weights)
    return _Nodes(np.concatenate(thetas), np.concatenate(weights))


# ---------------------------------------------------------------------------
# coefficients


def _is_piecewise(f) -> bool:
    return isinstance(f, PiecewiseConstantAtom)


def coefficients(f, spec: BasisSpec, cutoff: int,
                 tol: Tolerance = DEFAULT_COEF_TOL) -> CoefficientTable:
    """Inner products of f with every basis member up to |n| <= cutoff.

    ``f`` is a PiecewiseConstantAtom (integrated exactly piecewise, with
    breakpoints as panel boundaries) or a vectorized callable on the
    spec's domain.  Node counts double until the assembled table moves by
    less than the tolerance.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    if spec.d > 3:
        raise DomainError("coefficient tables are capped at d <= 3")
    if spec.d >= 2 and cutoff > MULTI_D_CUTOFF_CAP:
        raise DomainError(
            f"multi-dimensional cutoff capped at {MULTI_D_CUTOFF_CAP}"
        )
    full = _assemble(f, spec, cutoff, tol)
    indices = multi_indices(spec.d, cutoff)
    entries = {n: float(full[n]) for n in indices}
    return CoefficientTable(spec=spec, cutoff=cutoff, entries=entries)


def _assemble(f, spec: BasisSpec, cutoff: int, tol: Tolerance) -> np.ndarray:
    prev = None
    scale_rounds = 4
    for round_idx in range(scale_rounds):
        factor = 2**round_idx
        if _is_piecewise(f):
            full = _assemble_piecewise(f, spec, cutoff, factor)
        else:
            full = _assemble_callable(f, spec, cutoff, factor)
        if prev is not None:
            err = float(np.max(np.abs(full - prev)))
            scale = max(1.0, float(np.max(np.abs(full))))
            # the degree recurrence itself carries O(cutoff * eps) rounding,
            # so certification cannot go below that floor
            floor = 5e-15 * cutoff * scale
            if err <= tol.rel * scale + tol.abs + floor:
                return full
        prev = full
    raise AccuracyError(
        "coefficient quadrature did not settle after node doubling",
        estimate=prev, error_bound=None,
    )


def _assemble_piecewise(atom: PiecewiseConstantAtom, spec: BasisSpec,
                        cutoff: int, factor: int) -> np.ndarray:
    if atom.d != spec.d:
        raise DomainError("atom dimension does not match the basis spec")
    moments = []
    for axis in range(spec.d):
        bp = atom.breakpoints[axis]
        intervals = list(zip(bp, bp[1:]))
        other_axes = tuple(i for i in range(spec.d) if i != axis)
        alive = np.any(atom.values != 0.0, axis=other_axes) if other_axes else (
            atom.values != 0.0)
        skip = [not bool(alive[j]) for j in range(len(intervals))]
        moments.append(_axis_moments(spec.family, spec.params[axis], cutoff,
                                     intervals, factor, skip=skip))
    if spec.d == 1:
        return moments[0] @ atom.values
    if spec.d == 2:
        return np.einsum("ka,lb,ab->kl", moments[0], moments[1], atom.values)
    return np.einsum("ka,lb,mc,abc->klm", moments[0], moments[1], moments[2],
                     atom.values)


def _assemble_callable(f, spec: BasisSpec, cutoff: int, factor: int) -> np.ndarray:
    lo, hi = spec.domain
    axis_nodes, axis_tables = [], []
    for axis in range(spec.d):
        nd = _axis_quadrature(spec.family, spec.params[axis], lo, hi, cutoff, factor)
        table = _coef_table(spec.family, spec.params[axis], cutoff, nd.theta)
        axis_nodes.append(nd)
        axis_tables.append(table * nd.weights)
    if spec.d == 1:
        fv = np.asarray(f(axis_nodes[0].theta), dtype=float)
        return axis_tables[0] @ fv
    mesh = np.stack(
        np.meshgrid(*[nd.theta for nd in axis_nodes], indexing="ij"), axis=-1
    )
    fv = np.asarray(f(mesh), dtype=float)
    if spec.d == 2:
        return np.einsum("ka,lb,ab->kl", axis_tables[0], axis_tables[1], fv)
    return np.einsum("ka,lb,mc,abc->klm", axis_tables[0], axis_tables[1],
                     axis_tables[2], fv)


# ---------------------------------------------------------------------------
# Hardy functional and Parseval diagnostics


def hardy_sum(table: CoefficientTable, exponent: float) -> float:
    """Sum of |<f, basis_n>| / (|n|+1)^exponent over the table."""
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    total = 0.0
    for n, v in table.entries.items():
        total += abs(v) / (sum(n) + 1.0) ** exponent
    return total


def _norm_weight_family(family: BasisFamily) -> BasisFamily:
    """Family whose absorbed panel weight equals the measure density alone
    (the fun families live in plain L^2, matching the sym-fun panels)."""
    if family in (BasisFamily.TRIG_POLY, BasisFamily.Q_POLY):
        return BasisFamily.TRIG_POLY
    if family is BasisFamily.SYM_TRIG_POLY:
        return BasisFamily.SYM_TRIG_POLY
    return BasisFamily.SYM_TRIG_FUN


def l2_norm_sq(f, spec: BasisSpec, tol: Tolerance = DEFAULT_COEF_TOL) -> float:
    """Squared norm of f in the family's L^2 space."""
    if _is_piecewise(f):
        return float(f._moment(lambda v: v * v))
    lo, hi = spec.domain
    prev = None
    for round_idx in range(4):
        total_axes = []
        for axis in range(spec.d):
            p = spec.params[axis]
            nd = _axis_quadrature(_norm_weight_family(spec.family), p, lo, hi,
                                  48, 2**round_idx)
            total_axes.append(nd)
        if spec.d == 1:
            fv = np.asarray(f(total_axes[0].theta), dtype=float)
            val = float(np.dot(total_axes[0].weights, fv * fv))
        else:
            mesh = np.stack(
                np.meshgrid(*[nd.theta for nd in total_axes], indexing="ij"),
                axis=-1,
            )
            fv = np.asarray(f(mesh), dtype=float) ** 2
            for nd in reversed(total_axes):
                fv = fv @ nd.weights
            val = float(fv)
        if prev is not None and abs(val - prev) <= tol.rel * max(1.0, abs(val)) + tol.abs:
            return val
        prev = val
    raise AccuracyError("norm quadrature did not settle", estimate=prev)


def parseval_defect(f, spec: BasisSpec, cutoff: int,
                    tol: Tolerance = DEFAULT_COEF_TOL) -> float:
    """||f||^2 minus the energy captured by the table up to the cutoff."""
    table = coefficients(f, spec, cutoff, tol)
    captured = float(np.dot(table.vector(), table.vector()))
    return l2_norm_sq(f, spec, tol) - captured


# ---------------------------------------------------------------------------
# parity decomposition on the symmetric cube


def parity_map(n) -> tuple:
    """Component-wise parity of a multi-index."""
    return tuple(int(v) % 2 for v in n)


def parity_shifted_params(p: JacobiParams, sigma_i: int) -> JacobiParams:
    """Axis parameters after parity reduction: shift by one on odd axes."""
    return p.shifted() if sigma_i else p


def parity_components(f, sigma) -> object:
    """Projection of f onto the chosen even/odd class per axis.

    Returns the same kind of descriptor it was given: a reflected
    piecewise-constant function for piecewise input, otherwise a callable.
    """
    sigma = tuple(int(s) for s in sigma)
    if any(s not in (0, 1) for s in sigma):
        raise ValueError("sigma entries must be 0 or 1")
    if _is_piecewise(f):
        return _parity_piecewise(f, sigma)
    d = len(sigma)

    def projected(points):
        pts = np.asarray(points, dtype=float)
        total = None
        for eps_mask in range(2**d):
            eps = np.array([1.0 if (eps_mask >> i) & 1 == 0 else -1.0
                            for i in range(d)])
            sign = float(np.prod(eps**np.array(sigma)))
            val = sign * np.asarray(f(pts * (eps if d > 1 else eps[0])), dtype=float)
            total = val if total is None else total + val
        return total / 2**d

    return projected


def _parity_piecewise(atom: PiecewiseConstantAtom, sigma) -> PiecewiseConstantAtom:
    if atom.d != len(sigma):
        raise ValueError("sigma length must match the atom dimension")
    new_bps = []
    for bp, tag in zip(atom.breakpoints, atom.measures):
        lo, hi = tag.interval
        pts = set()
        for x in bp:
            pts.add(min(max(x, lo), hi))
            pts.add(min(max(-x, lo), hi))
        pts.update((lo, hi, 0.0))
        new_bps.append(tuple(sorted(pts)))
    shape = [len(bp) - 1 for bp in new_bps]
    mids = [np.array([(a + b) / 2 for a, b in zip(bp, bp[1:])]) for bp in new_bps]
    mesh = np.stack(np.meshgrid(*mids, indexing="ij"), axis=-1)
    if atom.d == 1:
        mesh = mesh[..., 0]
    values = np.zeros(shape)
    d = atom.d
    for eps_mask in range(2**d):
        eps = np.array([1.0 if (eps_mask >> i) & 1 == 0 else -1.0 for i in range(d)])
        sign = float(np.prod(eps**np.array(sigma)))
        arg = mesh * (eps if d > 1 else eps[0])
        values += sign * atom(arg)
    values /= 2**d
    return PiecewiseConstantAtom(
        new_bps, values, atom.measures,
        tuple(tag.interval for tag in atom.measures),
        {**atom.metadata, "parity": list(sigma)},
    )


# ---------------------------------------------------------------------------
# abstract admissible-exponent arithmetic


@dataclass(frozen=True)
class HardyParameters:
    """Inputs of the abstract Hardy-inequality theorem."""

    N: Fraction
    gamma: Fraction
    delta_set: frozenset
    d: int

    def __init__(self, N, gamma, delta_set, d):
        N = Fraction(N)
        gamma = Fraction(gamma)
        if N <= 0 or gamma <= 0:
            raise ValueError("N and gamma must be positive")
        delta_set = frozenset(Fraction(x) for x in delta_set)
        if not delta_set or any(x <= 0 for x in delta_set):
            raise ValueError("delta_set must be a non-empty set of positive reals")
        if d < 1:
            raise ValueError("d must be a positive integer")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "delta_set", delta_set)
        object.__setattr__(self, "d", int(d))


def admissible_exponent(hp: HardyParameters) -> Fraction:
    """gamma N / (N+2) + d/2, exactly in rational arithmetic."""
    return hp.gamma * hp.N / (hp.N + 2) + Fraction(hp.d, 2)


def _max_term(p: JacobiParams) -> Fraction:
    return max(Fraction(p.alpha), Fraction(p.beta), Fraction(-1, 2))


def polynomial_setting(params) -> HardyParameters:
    """Abstract parameters realized by the polynomial system in d dims."""
    params = list(params)
    d = len(params)
    s = sum((_max_term(p) for p in params), Fraction(0))
    return HardyParameters(N=2 * d + 2 * s, gamma=d + 1 + s, delta_set={1}, d=d)


def function_setting(params) -> HardyParameters:
    """Abstract parameters realized by the function system in d dims."""
    params = list(params)
    d = len(params)
    delta = {Fraction(1)}
    for p in params:
        for x in (Fraction(p.alpha) + Fraction(1, 2), Fraction(p.beta) + Fraction(1, 2)):
            if x > 0:
                delta.add(x)
    return HardyParameters(N=Fraction(d), gamma=Fraction(d + 2, 2),
                           delta_set=delta, d=d)


# ---------------------------------------------------------------------------
# Gram matrices (orthonormality diagnostics)


def gram_matrix(family: BasisFamily, p: JacobiParams, size: int = 24) -> np.ndarray:
    """Gram matrix of the first ``size`` family members under its measure.

    Uses Gauss-Jacobi rules (pulled back to the angle variable), which are
    exact for every product appearing in these families, so deviations
    from the identity measure evaluator defects only.
    """
    m = 2 * size + 4
    if family is BasisFamily.TRIG_POLY:
        rule = mu_rule(m, p)
        table = family_table(family, size - 1, p, rule.nodes)
        return (table * rule.weights) @ table.T
    if family is BasisFamily.Q_POLY:
        rule = mu_rule(m + 2, p)
        table = family_table(family, size - 1, p, rule.nodes)
        return (table * rule.weights) @ table.T
    if family is BasisFamily.TRIG_FUN:
        nodes, weights = weighted_lebesgue_nodes(m, p)
        table = family_table(family, size - 1, p, nodes)
        return (table * weights) @ table.T
    if family is BasisFamily.SYM_TRIG_POLY:
        rule = mu_rule(m + 2, p)
        right = family_table(family, size - 1, p, rule.nodes)
        left = family_table(family, size - 1, p, -rule.nodes)
        return (right * rule.weights) @ right.T + (left * rule.weights) @ left.T
    if family is BasisFamily.SYM_TRIG_FUN:
        nodes, weights = weighted_lebesgue_nodes(m + 2, p)
        right = family_table(family, size - 1, p, nodes)
        left = family_table(family, size - 1, p, -nodes)
        return (right * weights) @ right.T + (left * weights) @ left.T
    raise ValueError(f"unknown family {family}")
