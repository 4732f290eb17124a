"""Piecewise-constant atoms used in the sharpness counterexamples.

Three one-dimensional shapes: the two-level atom concentrated at the
origin for the polynomial system at max(alpha, beta) >= -1/2, the
two-bump (1,q)-atom splitting mass between the origin and pi/2 for
max(alpha, beta) < -1/2, and the Lebesgue-measure two-level atom for the
function system.  Tensor products with the dimension-corrected exponents
cover d > 1.  Constructors are deterministic; ``validate_atom`` re-checks
the defining inequalities instead of trusting the construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bases import JacobiParams
from .errors import ConstructionError
from .quadrature import MeasureKind, MeasureTag, interval_mass

__all__ = [
    "PiecewiseConstantAtom",
    "AtomReport",
    "constant_atom",
    "make_atom_pol_a",
    "make_atom_pol_b",
    "make_atom_fun",
    "make_atom_tensor",
    "validate_atom",
]


@dataclass(frozen=True)
class PiecewiseConstantAtom:
    """Axis-aligned piecewise-constant function with a support ball.

    ``breakpoints`` holds one increasing tuple per axis and ``values`` the
    box values (shape: one fewer than breakpoints along each axis).  For
    d = 1 the constructor also accepts flat sequences.
    """

    breakpoints: tuple
    values: np.ndarray
    measures: tuple
    ball: tuple
    metadata: dict

    def __init__(self, breakpoints, values, measures, ball, metadata=None):
        if breakpoints and np.isscalar(breakpoints[0]):
            breakpoints = (tuple(float(x) for x in breakpoints),)
        else:
            breakpoints = tuple(tuple(float(x) for x in bp) for bp in breakpoints)
        if isinstance(measures, MeasureTag):
            measures = (measures,)
        measures = tuple(measures)
        values = np.asarray(values, dtype=float)
        if values.ndim != len(breakpoints):
            values = values.reshape([len(bp) - 1 for bp in breakpoints])
        for axis, bp in enumerate(breakpoints):
            if len(bp) < 2 or any(b <= a for a, b in zip(bp, bp[1:])):
                raise ConstructionError(f"axis {axis} breakpoints must increase")
            if values.shape[axis] != len(bp) - 1:
                raise ConstructionError(
                    f"axis {axis}: {len(bp) - 1} intervals vs {values.shape[axis]} values"
                )
        if len(measures) != len(breakpoints):
            raise ConstructionError("one measure tag per axis required")
        if ball and np.isscalar(ball[0]):
            ball = (tuple(ball),)
        ball = tuple(tuple(map(float, iv)) for iv in ball)
        values.flags.writeable = False
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "measures", measures)
        object.__setattr__(self, "ball", ball)
        object.__setattr__(self, "metadata", dict(metadata or {}))

    @property
    def d(self) -> int:
        return len(self.breakpoints)

    @property
    def measure(self) -> MeasureTag:
        if self.d != 1:
            raise ValueError("scalar measure tag is only defined for d = 1")
        return self.measures[0]

    def __call__(self, theta) -> np.ndarray:
        point = np.asarray(theta, dtype=float)
        if self.d == 1:
            axes = [point]
        else:
            axes = [point[..., i] for i in range(self.d)]
        idx = []
        inside = np.ones(np.shape(axes[0]), dtype=bool)
        for bp, x in zip(self.breakpoints, axes):
            edges = np.asarray(bp)
            j = np.searchsorted(edges, x, side="right") - 1
            inside &= (j >= 0) & (j < len(edges) - 1) & (x > edges[0]) & (x <= edges[-1])
            idx.append(np.clip(j, 0, len(edges) - 2))
        out = self.values[tuple(idx)]
        return np.where(inside, out, 0.0)

    def panel_masses(self) -> list:
        """Per-axis measures of the breakpoint intervals."""
        return [
            np.array([interval_mass(tag, a, b) for a, b in zip(bp, bp[1:])])
            for tag, bp in zip(self.measures, self.breakpoints)
        ]

    def mean(self) -> float:
        return self._moment(lambda v: v)

    def norm(self, q: float = 2.0) -> float:
        return self._moment(lambda v: np.abs(v) ** q) ** (1.0 / q)

    def _moment(self, transform) -> float:
        acc = transform(self.values)
        for axis, mass in enumerate(self.panel_masses()):
            shape = [1] * self.d
            shape[axis] = mass.size
            acc = acc * mass.reshape(shape)
        return float(acc.sum())

    def ball_measure(self) -> float:
        total = 1.0
        for tag, (lo, hi) in zip(self.measures, self.ball):
            total *= interval_mass(tag, lo, hi)
        return total

    def to_json(self) -> str:
        payload = {
            "breakpoints": [list(bp) for bp in self.breakpoints],
            "values": self.values.tolist(),
            "measures": [
                {
                    "kind": tag.kind.value,
                    "alpha": None if tag.params is None else tag.params.alpha,
                    "beta": None if tag.params is None else tag.params.beta,
                    "interval": list(tag.interval),
                }
                for tag in self.measures
            ],
            "ball": [list(iv) for iv in self.ball],
            "metadata": self.metadata,
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "PiecewiseConstantAtom":
        payload = json.loads(text)
        measures = tuple(
            MeasureTag(
                MeasureKind(m["kind"]),
                None if m["alpha"] is None else JacobiParams(m["alpha"], m["beta"]),
                tuple(m["interval"]),
            )
            for m in payload["measures"]
        )
        return PiecewiseConstantAtom(
            payload["breakpoints"], np.array(payload["values"]),
            measures, payload["ball"], payload["metadata"],
        )


@dataclass(frozen=True)
class AtomReport:
    mean: float
    l2_norm: float
    ball_measure: float
    is_h1_atom: bool
    is_1q_atom: bool | None
    q: float | None
    margins: dict


def constant_atom(tag: MeasureTag) -> PiecewiseConstantAtom:
    """The extra atom 1/measure(X) on the whole space (mean-zero waived)."""
    lo, hi = tag.interval
    value = 1.0 / tag.total_mass()
    return PiecewiseConstantAtom(
        (lo, hi), [value], tag, (lo, hi), {"kind": "constant"},
    )


def make_atom_pol_a(K: int, delta: float, c: float, p: JacobiParams,
                    power: float | None = None) -> PiecewiseConstantAtom:
    """Two-level atom at the origin for the polynomial setting.

    Values -(K/c)^{2a+2} (1-delta^{2a+2}) on (0, c delta/K] and
    C (K delta/c)^{2a+2} on (c delta/K, c/K], with C solved from mean zero
    against the half-angle measure (a = alpha).  ``power`` overrides the
    exponent 2a+2 of K/c and K delta/c for the tensor-product variant.
    """
    if K < 2:
        raise ConstructionError("K must be at least 2")
    if not 0.0 < delta < 1.0:
        raise ConstructionError("delta must lie in (0, 1)")
    if not 0.0 < c / K < math.pi:
        raise ConstructionError("need 0 < c/K < pi")
    a2 = 2.0 * p.alpha + 2.0
    if power is None:
        power = a2
    tag = MeasureTag(MeasureKind.MU, p)
    b1, b2 = c * delta / K, c / K
    m1 = interval_mass(tag, 0.0, b1)
    m2 = interval_mass(tag, b1, b2)
    if m1 <= 0.0 or m2 <= 0.0:
        raise ConstructionError("zero-measure piece; cannot normalize")
    v1 = -((K / c) ** power) * (1.0 - delta ** a2)
    c_delta_k = -v1 * m1 / ((K * delta / c) ** power * m2)
    v2 = c_delta_k * (K * delta / c) ** power
    return PiecewiseConstantAtom(
        (0.0, b1, b2), [v1, v2], tag, (0.0, b2),
        {"kind": "pol-a", "K": K, "delta": delta, "c": c,
         "C_delta_K": c_delta_k, "power": power},
    )


def make_atom_pol_b(K: int, c: float, epsilon: float, p: JacobiParams,
                    power_origin: float | None = None,
                    power_bump: float | None = None) -> PiecewiseConstantAtom:
    """(1,q)-atom for the polynomial setting at max(alpha, beta) < -1/2.

    Value -C K^{2a+2-eps/2} on (0, c/K] and K^{1-eps/2} on the window of
    half-width c/K around pi/2, C solved from mean zero.
    """
    if K < 2:
        raise ConstructionError("K must be at least 2")
    if not 0.0 < epsilon < 1.0:
        raise ConstructionError("epsilon must lie in (0, 1)")
    if not c / K < math.pi / 2 - c / K:
        raise ConstructionError("pieces overlap; c/K too large")
    if power_origin is None:
        power_origin = 2.0 * p.alpha + 2.0 - epsilon / 2.0
    if power_bump is None:
        power_bump = 1.0 - epsilon / 2.0
    tag = MeasureTag(MeasureKind.MU, p)
    b1 = c / K
    lo, hi = math.pi / 2 - c / K, math.pi / 2 + c / K
    m1 = interval_mass(tag, 0.0, b1)
    m2 = interval_mass(tag, lo, hi)
    if m1 <= 0.0 or m2 <= 0.0:
        raise ConstructionError("zero-measure piece; cannot normalize")
    v2 = K ** power_bump
    c_k = v2 * m2 / (K ** power_origin * m1)
    v1 = -c_k * K ** power_origin
    return PiecewiseConstantAtom(
        (0.0, b1, lo, hi), [v1, 0.0, v2], tag, (0.0, hi),
        {"kind": "pol-b", "K": K, "c": c, "epsilon": epsilon, "C_K": c_k,
         "power_origin": power_origin, "power_bump": power_bump},
    )


def make_atom_fun(K: int, delta: float, c: float) -> PiecewiseConstantAtom:
    """Lebesgue-measure two-level atom for the function setting.

    -K/c on (0, c delta/K] and delta/(1-delta) K/c on (c delta/K, c/K];
    the mean vanishes identically and the size condition holds for
    delta <= 1/2.
    """
    if K < 2:
        raise ConstructionError("K must be at least 2")
    if not 0.0 < delta < 0.5:
        raise ConstructionError("delta must lie in (0, 1/2)")
    if not 0.0 < c / K < math.pi:
        raise ConstructionError("need 0 < c/K < pi")
    tag = MeasureTag(MeasureKind.LEBESGUE)
    b1, b2 = c * delta / K, c / K
    v1 = -K / c
    v2 = (delta / (1.0 - delta)) * K / c
    return PiecewiseConstantAtom(
        (0.0, b1, b2), [v1, v2], tag, (0.0, b2),
        {"kind": "fun", "K": K, "delta": delta, "c": c},
    )


def make_atom_tensor(K: int, kinds, epsilon: float, d: int, params,
                     delta: float = 0.25, c: float | None = None,
                     cs=None) -> PiecewiseConstantAtom:
    """Tensor product of per-axis origin/bump atoms with corrected exponents.

    ``kinds`` picks "a" or "b" per axis; the exponent corrections replace
    eps/2 by eps/(d+1), and for type-a axes the powers of K/c and
    K delta/c drop by eps/(d+1).
    """
    if d > 3:
        raise ConstructionError("tensor atoms are capped at d <= 3")
    kinds = list(kinds)
    params = list(params)
    if len(kinds) != d or len(params) != d:
        raise ConstructionError("need one kind and one parameter pair per axis")
    if cs is None:
        if c is None:
            raise ConstructionError("provide c or per-axis cs")
        cs = [c] * d
    shrink = epsilon / (d + 1.0)
    factors = []
    for kind, p, ci in zip(kinds, params, cs):
        if kind == "a":
            factors.append(make_atom_pol_a(
                K, delta, ci, p, power=2.0 * p.alpha + 2.0 - shrink))
        elif kind == "b":
            factors.append(make_atom_pol_b(
                K, ci, epsilon, p,
                power_origin=2.0 * p.alpha + 2.0 - shrink,
                power_bump=1.0 - shrink))
        else:
            raise ConstructionError(f"unknown axis kind {kind!r}")
    breakpoints = tuple(f.breakpoints[0] for f in factors)
    values = factors[0].values
    for f in factors[1:]:
        values = np.multiply.outer(values, f.values)
    return PiecewiseConstantAtom(
        breakpoints, values,
        tuple(f.measures[0] for f in factors),
        tuple(f.ball[0] for f in factors),
        {"kind": "tensor", "K": K, "axis_kinds": kinds, "epsilon": epsilon,
         "delta": delta, "cs": list(cs)},
    )


def validate_atom(atom: PiecewiseConstantAtom, q: float | None = None,
                  tol: float = 1e-10) -> AtomReport:
    """Check the defining atom inequalities and report margins.

    Mean zero is compared against the L1 size of the atom; the size
    condition allows a relative slack ``tol``.  The constant atom skips
    the mean-zero requirement.
    """
    if q is not None and not 1.0 < q <= 2.0:
        raise ValueError("q must lie in (1, 2]")
    mean = atom.mean()
    l1 = atom.norm(1.0)
    l2 = atom.norm(2.0)
    ball = atom.ball_measure()
    is_constant = atom.metadata.get("kind") == "constant"
    mean_ok = is_constant or abs(mean) <= tol * max(l1, 1.0)
    size_ok = l2 <= ball ** -0.5 * (1.0 + tol)
    margins = {
        "mean_over_l1": abs(mean) / l1 if l1 > 0 else 0.0,
        "l2_times_sqrt_ball": l2 * math.sqrt(ball),
    }
    is_1q = None
    if q is not None:
        lq = atom.norm(q)
        bound = ball ** (1.0 / q - 1.0)
        is_1q = bool(mean_ok and lq <= bound * (1.0 + tol))
        margins["lq_over_bound"] = lq / bound
    return AtomReport(
        mean=mean, l2_norm=l2, ball_measure=ball,
        is_h1_atom=bool(mean_ok and size_ok), is_1q_atom=is_1q, q=q,
        margins=margins,
    )
