"""Sharpness and divergence harnesses.

Finite computation cannot exhibit a divergent series, only growth: the
harnesses here build the counterexample atoms at increasing cutoffs, sum
the weighted coefficients, and fit growth models; divergence claims are
additionally probed by non-Cauchy increment tests on geometric cutoff
grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import calibrated_c
from .atoms import (PiecewiseConstantAtom, make_atom_fun, make_atom_pol_a,
                    make_atom_pol_b, validate_atom)
from .bases import (BasisFamily, BasisSpec, JacobiParams, envelope_exponent,
                    trig_fun_table, trig_poly_table)
from .errors import DomainError
from .expansion import coefficients, hardy_sum, l2_norm_sq
from .fitting import GrowthFit, fit_power_model, fit_semilog_model
from .quadrature import MeasureKind, MeasureTag
from .specfun import Tolerance

__all__ = [
    "GrowthFit",
    "SHARPNESS_SETTINGS",
    "critical_exponent",
    "sharpness_atom",
    "sharpness_growth",
    "l1_partial_sums",
    "l1_sup_divergence",
    "series_lemma_partial",
    "series_estim_ratio",
    "HardyBoundReport",
    "hardy_bound_suite",
]

SHARPNESS_SETTINGS = ("pol-a", "pol-b", "fun", "sym")
DEFAULT_DELTA = 0.25


def critical_exponent(setting: str, p: JacobiParams) -> float:
    """Exponent at which the one-dimensional Hardy sum stops growing."""
    if setting == "pol-a":
        return 1.5 + max(p.alpha, p.beta, -0.5)
    if setting in ("pol-b", "fun", "sym"):
        return 1.0
    raise DomainError(f"unknown setting {setting!r}")


def _even_extension_atom(K: int, delta: float, c: float) -> PiecewiseConstantAtom:
    """Even reflection of the function-setting atom onto (-pi, pi), scaled
    to keep the size condition (delta <= 1/3 suffices)."""
    base = make_atom_fun(K, delta, c)
    (b0, b1, b2), = base.breakpoints
    v1, v2 = base.values / math.sqrt(2.0)
    tag = MeasureTag(MeasureKind.LEBESGUE, interval=(-math.pi, math.pi))
    return PiecewiseConstantAtom(
        (-b2, -b1, 0.0, b1, b2), [v2, v1, v1, v2], tag, (-b2, b2),
        {"kind": "fun-even", "K": K, "delta": delta, "c": c},
    )


def sharpness_atom(setting: str, K: int, p: JacobiParams, epsilon: float,
                   delta: float = DEFAULT_DELTA,
                   c: float | None = None) -> PiecewiseConstantAtom:
    """Counterexample atom of the given setting at cutoff K."""
    if c is None:
        c = calibrated_c(p)
    if setting == "pol-a":
        return make_atom_pol_a(K, delta, c, p)
    if setting == "pol-b":
        return make_atom_pol_b(K, c, epsilon, p)
    if setting == "fun":
        return make_atom_fun(K, delta, c)
    if setting == "sym":
        return _even_extension_atom(K, delta, c)
    raise DomainError(f"unknown setting {setting!r}")


def _setting_spec(setting: str, p: JacobiParams) -> BasisSpec:
    family = {
        "pol-a": BasisFamily.TRIG_POLY,
        "pol-b": BasisFamily.TRIG_POLY,
        "fun": BasisFamily.TRIG_FUN,
        "sym": BasisFamily.SYM_TRIG_FUN,
    }[setting]
    return BasisSpec(1, p, family)


def sharpness_growth(setting: str, p: JacobiParams, epsilon: float, k_grid,
                     at_critical: bool = False, delta: float = DEFAULT_DELTA,
                     c: float | None = None,
                     tol: Tolerance | None = None) -> GrowthFit:
    """Growth fit of the weighted coefficient sums of the counterexample
    atoms against the cutoff.

    For each K the atom is built, its coefficients computed to cutoff K,
    and sum_{k=1..K} |<a_K, basis_k>| / k^{E - eps} evaluated, where E is
    the critical exponent of the setting.  ``at_critical`` keeps the atoms
    (built with eps) but sums at the full exponent E, probing boundedness.
    """
    k_grid = [int(k) for k in k_grid]
    if any(k < 2 for k in k_grid) or len(k_grid) < 2:
        raise DomainError("need a grid of cutoffs >= 2")
    if c is None:
        c = calibrated_c(p)
    exponent = critical_exponent(setting, p) - (0.0 if at_critical else epsilon)
    spec = _setting_spec(setting, p)
    sums = []
    for K in k_grid:
        atom = sharpness_atom(setting, K, p, epsilon, delta, c)
        kwargs = {} if tol is None else {"tol": tol}
        table = coefficients(atom, spec, K, **kwargs)
        ks = np.arange(1, K + 1, dtype=float)
        coefs = np.abs(table.vector()[1:])
        sums.append(float(np.dot(coefs, ks**-exponent)))
    return fit_power_model(np.asarray(k_grid, dtype=float), np.asarray(sums))


# ---------------------------------------------------------------------------
# L^1 sup-divergence probes


def l1_partial_sums(setting: str, p: JacobiParams, k_grid,
                    c: float | None = None) -> np.ndarray:
    """Partial sums of the sup-norm divergence series at each cutoff.

    pol-large evaluates the polynomial series at theta = c/K (the angle
    shrinks with the cutoff); pol-small and fun evaluate at pi/2.
    """
    k_grid = [int(k) for k in k_grid]
    kmax = max(k_grid)
    if setting == "pol-large":
        if c is None:
            c = calibrated_c(p)
        exponent = 1.5 + max(p.alpha, p.beta, -0.5)
        sums = []
        for K in k_grid:
            values = np.abs(trig_poly_table(K, p, np.float64(c / K)))
            ks = np.arange(1, K + 1, dtype=float)
            sums.append(float(np.dot(values[1:], ks**-exponent)))
        return np.asarray(sums)
    if setting == "pol-small":
        values = np.abs(trig_poly_table(kmax, p, np.float64(0.5 * math.pi)))
        weighted = values[1:] / np.arange(1, kmax + 1, dtype=float)
    elif setting == "fun":
        values = np.abs(trig_fun_table(kmax, p, np.float64(0.5 * math.pi)))
        weighted = values / np.arange(1, kmax + 2, dtype=float)
    else:
        raise DomainError(f"unknown setting {setting!r}")
    cum = np.concatenate([[0.0], np.cumsum(weighted)])
    return np.asarray([cum[K if setting == "pol-small" else K + 1] for K in k_grid])


def l1_sup_divergence(setting: str, p: JacobiParams, k_grid,
                      c: float | None = None) -> GrowthFit:
    """Semilog fit of the partial sums: divergence shows as a positive
    log-slope (never as a literal infinity)."""
    sums = l1_partial_sums(setting, p, k_grid, c)
    return fit_semilog_model(np.asarray([int(k) for k in k_grid], dtype=float), sums)


# ---------------------------------------------------------------------------
# the elementary divergent series of the lemma


def series_lemma_partial(d: int, j: int, a, b, omega, n_max: int) -> float:
    """Partial sum over shells |n| <= n_max of
    prod |cos(a_i n_i + b_i)| * prod (n_s+1)^{omega_s} / (|n|+1)^{d+sum omega}.

    The first product runs over the j cosine axes, the second over the
    remaining d-j power axes.
    """
    if d not in (1, 2, 3):
        raise DomainError("d must be 1, 2, or 3")
    if not 0 <= j <= d:
        raise DomainError("j must lie in 0..d")
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    omega = [float(x) for x in omega]
    if len(a) != j or len(b) != j or len(omega) != d - j:
        raise DomainError("need j phases a, j offsets b, and d-j exponents")
    for x in a:
        if abs(math.remainder(x, math.pi)) < 1e-12:
            raise DomainError("phase multiples of pi make the cosines vanish")
    terms_per_shell = {1: 1, 2: n_max + 1, 3: (n_max + 1) ** 2}[d]
    if (n_max + 1) * terms_per_shell > 2 * 10**5:
        raise DomainError("total term budget exceeded")
    denom_power = d + sum(omega)

    def axis_factor(i: int, n: np.ndarray) -> np.ndarray:
        if i < j:
            return np.abs(np.cos(a[i] * n + b[i]))
        return (n + 1.0) ** omega[i - j]

    total = 0.0
    for s in range(n_max + 1):
        if d == 1:
            shell = axis_factor(0, np.array([float(s)]))
        elif d == 2:
            n1 = np.arange(s + 1, dtype=float)
            shell = axis_factor(0, n1) * axis_factor(1, s - n1)
        else:
            parts = []
            for v1 in range(s + 1):
                n2 = np.arange(s - v1 + 1, dtype=float)
                parts.append(axis_factor(0, np.full_like(n2, v1))
                             * axis_factor(1, n2) * axis_factor(2, s - v1 - n2))
            shell = np.concatenate(parts)
        total += math.fsum(shell) / (s + 1.0) ** denom_power
    return total


def series_estim_ratio(omega: float, r_grid) -> float:
    """sup over the grid of (1-r)^{omega+1} sum_{k>=1} r^k k^omega."""
    if omega < 0:
        raise DomainError("omega must be non-negative")
    best = 0.0
    for r in np.asarray(r_grid, dtype=float):
        if not 0.0 < r < 1.0:
            raise DomainError("r grid must lie in (0, 1)")
        total = 0.0
        start = 1
        block = 4096
        while True:
            k = np.arange(start, start + block, dtype=float)
            chunk = float(np.dot(r**k, k**omega))
            total += chunk
            start += block
            if chunk <= 1e-17 * total:
                break
        best = max(best, (1.0 - r) ** (omega + 1.0) * total)
    return best


# ---------------------------------------------------------------------------
# Hardy-bound verification over atom suites


@dataclass(frozen=True)
class HardyBoundReport:
    """Hardy sums of an atom suite at a fixed exponent, with tail control."""

    exponent: float
    sums: tuple
    cutoffs: tuple
    tail_bounds: tuple
    tail_met: tuple
    atom_sizes: tuple
    max_sum: float
    growth: GrowthFit | None
    unbounded_looking: bool
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "sums": list(self.sums),
            "cutoffs": list(self.cutoffs),
            "tail_bounds": list(self.tail_bounds),
            "tail_met": list(self.tail_met),
            "atom_sizes": list(self.atom_sizes),
            "max_sum": self.max_sum,
            "growth": None if self.growth is None else self.growth.to_dict(),
            "unbounded_looking": self.unbounded_looking,
            "provenance": self.provenance,
        }


def _tail_bound(spec: BasisSpec, exponent: float, atom_l1: float,
                defect: float, cutoff: int) -> float:
    """Upper bound on the dropped Hardy-sum tail beyond the cutoff.

    Two routes: the sup-norm envelope (useful above the critical
    exponent) and Cauchy-Schwarz against the Parseval defect (works at
    the critical exponent, where the envelope series diverges).
    """
    s_env = envelope_exponent(spec.family, spec.params[0])
    bounds = []
    if exponent - s_env > 1.0:
        power = exponent - s_env
        bounds.append(atom_l1 * (cutoff + 1.0) ** (1.0 - power) / (power - 1.0))
    if exponent > 0.5 and defect >= 0.0:
        bounds.append(math.sqrt(defect)
                      * math.sqrt((cutoff + 1.0) ** (1.0 - 2 * exponent)
                                  / (2 * exponent - 1.0)))
    return min(bounds) if bounds else math.inf


def hardy_bound_suite(spec: BasisSpec, exponent: float, suite,
                      tail_target: float = 0.01, k_start: int = 256,
                      k_cap: int = 2**15, growth_slope_flag: float = 0.05,
                      require_atoms: bool = True) -> HardyBoundReport:
    """Hardy sums over a suite of atoms with automatic cutoff selection.

    Each atom's cutoff doubles until the estimated dropped tail is below
    ``tail_target`` of its sum (or the cap is hit; ``tail_met`` records
    which).  The report flags unbounded-looking growth of the sums
    against the atoms' construction size K.
    """
    if spec.d != 1:
        raise DomainError("the suite harness covers d = 1")
    suite = list(suite)
    sums, cutoffs, tails, met, sizes = [], [], [], [], []
    for atom in suite:
        if require_atoms:
            report = validate_atom(atom, q=None)
            if not report.is_h1_atom:
                raise DomainError("suite member fails the atom conditions")
        norm_sq = l2_norm_sq(atom, spec)
        l1 = atom.norm(1.0)
        cutoff = k_start
        while True:
            table = coefficients(atom, spec, cutoff)
            total = hardy_sum(table, exponent)
            defect = max(norm_sq - float(np.dot(table.vector(), table.vector())), 0.0)
            bound = _tail_bound(spec, exponent, l1, defect, cutoff)
            if bound <= tail_target * total or cutoff >= k_cap:
                break
            cutoff = min(2 * cutoff, k_cap)
        sums.append(total)
        cutoffs.append(cutoff)
        tails.append(bound)
        met.append(bool(bound <= tail_target * total))
        sizes.append(int(atom.metadata.get("K", 0)))
    growth = None
    unbounded = False
    if len(suite) >= 4 and all(s > 0 for s in sizes):
        growth = fit_power_model(np.asarray(sizes, dtype=float),
                                 np.asarray(sums))
        unbounded = growth.slope > growth_slope_flag
    provenance = {
        "family": spec.family.value,
        "alpha": spec.params[0].alpha,
        "beta": spec.params[0].beta,
        "atoms": [a.metadata for a in suite],
        "tail_target": tail_target,
        "k_cap": k_cap,
    }
    return HardyBoundReport(
        exponent=float(exponent), sums=tuple(sums), cutoffs=tuple(cutoffs),
        tail_bounds=tuple(tails), tail_met=tuple(met), atom_sizes=tuple(sizes),
        max_sum=max(sums) if sums else 0.0, growth=growth,
        unbounded_looking=unbounded, provenance=provenance,
    )
