import math
from fractions import Fraction

import numpy as np
import pytest

from jacobilab.atoms import (PiecewiseConstantAtom, constant_atom,
                             make_atom_fun, make_atom_pol_a)
from jacobilab.bases import (BasisFamily, BasisSpec, JacobiParams,
                             normalizing_const, trig_fun, trig_poly)
from jacobilab.errors import DomainError
from jacobilab.expansion import (CoefficientTable, HardyParameters,
                                 admissible_exponent, coefficients,
                                 function_setting, gram_matrix, hardy_sum,
                                 l2_norm_sq, multi_indices, parity_components,
                                 parity_map, parity_shifted_params,
                                 parseval_defect, polynomial_setting)
from jacobilab.quadrature import (MeasureKind, MeasureTag, integrate_mu,
                                  mu_total_mass)

P = JacobiParams(0.5, 0.0)
SPEC = BasisSpec(1, P, BasisFamily.TRIG_POLY)
SPEC_FUN = BasisSpec(1, P, BasisFamily.TRIG_FUN)


class TestEnumeration:
    def test_shells_then_lex(self):
        assert multi_indices(2, 2) == [
            (0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]

    def test_one_dim(self):
        assert multi_indices(1, 3) == [(0,), (1,), (2,), (3,)]

    def test_counts(self):
        assert len(multi_indices(3, 5)) == math.comb(5 + 3, 3)


class TestCoefficients:
    def test_basis_member_gives_unit_vector(self):
        table = coefficients(lambda t: trig_poly(3, P, t), SPEC, 8)
        expected = np.eye(9)[3]
        assert np.max(np.abs(table.vector() - expected)) < 1e-8

    def test_constant_atom_single_entry(self):
        atom = constant_atom(MeasureTag(MeasureKind.MU, P))
        table = coefficients(atom, SPEC, 5)
        assert table[(0,)] == pytest.approx(normalizing_const(0, P), rel=1e-12)
        assert np.max(np.abs(table.vector()[1:])) < 1e-12

    def test_linearity(self):
        f = lambda t: np.sin(t)
        g = lambda t: np.cos(2 * t)
        lhs = coefficients(lambda t: 2.0 * f(t) - 3.0 * g(t), SPEC, 6).vector()
        rhs = (2.0 * coefficients(f, SPEC, 6).vector()
               - 3.0 * coefficients(g, SPEC, 6).vector())
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_atom_panels_match_adaptive_quadrature(self):
        atom = make_atom_pol_a(32, 0.25, 0.4, P)
        table = coefficients(atom, SPEC, 32)
        for k in [1, 7, 32]:
            ref = integrate_mu(lambda t, k=k: atom(t) * trig_poly(k, P, t), P,
                               0.0, atom.breakpoints[0][-1])
            assert table[(k,)] == pytest.approx(ref, abs=1e-12)

    def test_product_function_tensorizes(self):
        p2 = JacobiParams(0.0, 0.0)
        spec2 = BasisSpec(2, (P, p2), BasisFamily.TRIG_POLY)
        f1 = lambda t: np.sin(t)
        f2 = lambda t: np.cos(t)
        table2 = coefficients(lambda pts: f1(pts[..., 0]) * f2(pts[..., 1]),
                              spec2, 6)
        t1 = coefficients(f1, SPEC, 6)
        t2 = coefficients(f2, BasisSpec(1, p2, BasisFamily.TRIG_POLY), 6)
        for n in multi_indices(2, 6):
            assert table2[n] == pytest.approx(t1[(n[0],)] * t2[(n[1],)],
                                              rel=1e-8, abs=1e-10)

    def test_multi_d_cutoff_cap(self):
        spec2 = BasisSpec(2, (P, P), BasisFamily.TRIG_POLY)
        with pytest.raises(DomainError):
            coefficients(lambda pts: pts[..., 0], spec2, 200)


class TestTableObject:
    def test_requires_complete_shells(self):
        with pytest.raises(ValueError):
            CoefficientTable(SPEC, 2, {(0,): 1.0})

    def test_csv_round_trip_precision(self):
        table = coefficients(lambda t: np.sin(3 * t) * np.exp(np.cos(t)), SPEC, 10)
        text = table.to_csv()
        rows = text.strip().splitlines()[1:]
        for row, (n, v) in zip(rows, table.ordered()):
            parts = row.split(",")
            assert int(parts[0]) == n[0]
            assert abs(float(parts[1]) - v) <= 1e-15 * max(1.0, abs(v))

    def test_json_round_trip(self):
        table = coefficients(lambda t: np.sin(t), SPEC, 6)
        back = CoefficientTable.from_json(table.to_json())
        assert back.cutoff == table.cutoff
        assert back.spec.family == table.spec.family
        for n, v in table.ordered():
            assert back[n] == v


class TestHardySum:
    def test_unit_vector_cases(self):
        entries = {n: 0.0 for n in multi_indices(1, 4)}
        entries[(0,)] = 1.0
        table = CoefficientTable(SPEC, 4, entries)
        assert hardy_sum(table, 3.7) == 1.0

        entries = {n: 0.0 for n in multi_indices(1, 4)}
        entries[(3,)] = 1.0
        table = CoefficientTable(SPEC, 4, entries)
        assert hardy_sum(table, 2.0) == pytest.approx(1.0 / 16.0, rel=1e-15)

    def test_monotone_in_exponent(self):
        table = coefficients(lambda t: np.sin(t), SPEC, 12)
        assert hardy_sum(table, 2.0) <= hardy_sum(table, 1.5)

    def test_monotone_in_cutoff(self):
        f = lambda t: np.sin(t)
        small = hardy_sum(coefficients(f, SPEC, 6), 1.0)
        large = hardy_sum(coefficients(f, SPEC, 12), 1.0)
        assert large >= small - 1e-12


class TestParseval:
    def test_captured_member_has_zero_defect(self):
        f = lambda t: trig_poly(5, P, t)
        assert abs(parseval_defect(f, SPEC, 6)) < 1e-8

    def test_finite_combination(self):
        f = lambda t: (1.2 * trig_poly(2, P, t) - 0.7 * trig_poly(4, P, t))
        assert abs(parseval_defect(f, SPEC, 4)) < 1e-8

    def test_defect_non_increasing(self):
        f = lambda t: np.exp(np.sin(2 * t))
        defects = [parseval_defect(f, SPEC, k) for k in (2, 6, 12)]
        assert defects[0] >= defects[1] >= defects[2] >= -1e-8

    def test_atom_norm_exact(self):
        atom = make_atom_fun(16, 0.25, 0.4)
        assert l2_norm_sq(atom, SPEC_FUN) == pytest.approx(
            (16 / 0.4) * 0.25 / 0.75, rel=1e-13)


class TestParity:
    def test_even_function_loses_odd_part(self):
        sym_spec = BasisSpec(1, P, BasisFamily.SYM_TRIG_FUN)
        f = lambda t: np.cos(t)
        odd = parity_components(f, (1,))
        theta = np.linspace(-3, 3, 11)
        assert np.max(np.abs(odd(theta))) < 1e-15

    def test_components_sum_to_function(self):
        rng = np.random.default_rng(7)
        f = lambda t: np.where(t > 0.3, 1.5, -0.2) + t**2
        parts = [parity_components(f, (s,)) for s in (0, 1)]
        theta = rng.uniform(-3, 3, 17)
        total = parts[0](theta) + parts[1](theta)
        assert np.max(np.abs(total - f(theta))) < 1e-14

    def test_piecewise_parity_reflection(self):
        tag = MeasureTag(MeasureKind.LEBESGUE, interval=(-math.pi, math.pi))
        atom = PiecewiseConstantAtom((-2.0, 0.5, 1.5), [1.0, -3.0], tag,
                                     (-math.pi, math.pi), {})
        even = parity_components(atom, (0,))
        # stay away from breakpoints: piecewise agreement is almost-everywhere
        theta = np.linspace(-2.5, 2.5, 41) + 1e-4
        expected = 0.5 * (atom(theta) + atom(-theta))
        assert np.max(np.abs(even(theta) - expected)) < 1e-14

    def test_parity_map_and_shift(self):
        assert parity_map((2, 3, 5)) == (0, 1, 1)
        shifted = parity_shifted_params(P, 1)
        assert shifted.alpha == P.alpha + 1 and shifted.beta == P.beta + 1
        assert parity_shifted_params(P, 0) == P


class TestExponentArithmetic:
    def test_polynomial_and_function_closed_forms(self):
        for d in (1, 2, 3):
            params = [JacobiParams(0.5, -0.3)] * d
            s = sum(max(Fraction(p.alpha), Fraction(p.beta), Fraction(-1, 2))
                    for p in params)
            assert admissible_exponent(polynomial_setting(params)) == \
                Fraction(3 * d, 2) + s
            assert admissible_exponent(function_setting(params)) == d

    def test_plain_arithmetic(self):
        hp = HardyParameters(N=1, gamma=Fraction(3, 2), delta_set={1}, d=1)
        assert admissible_exponent(hp) == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            HardyParameters(N=0, gamma=1, delta_set={1}, d=1)
        with pytest.raises(ValueError):
            HardyParameters(N=1, gamma=1, delta_set=set(), d=1)


class TestSymmetrizedReduction:
    def test_sqrt2_identity_even_and_odd(self):
        rng = np.random.default_rng(11)
        tag = MeasureTag(MeasureKind.LEBESGUE, interval=(-math.pi, math.pi))
        breaks = np.sort(rng.uniform(-3.0, 3.0, 5))
        values = rng.normal(size=4)
        f = PiecewiseConstantAtom(tuple(breaks), values, tag,
                                  (-math.pi, math.pi), {})
        sym_spec = BasisSpec(1, P, BasisFamily.SYM_TRIG_FUN)
        table = coefficients(f, sym_spec, 9)
        for n in range(10):
            sigma = n % 2
            f_sigma = parity_components(f, (sigma,))
            half = _restrict_positive(f_sigma)
            shifted = parity_shifted_params(P, sigma)
            half_spec = BasisSpec(1, shifted, BasisFamily.TRIG_FUN)
            half_table = coefficients(half, half_spec, n // 2)
            expected = math.sqrt(2.0) * half_table[(n // 2,)]
            assert table[(n,)] == pytest.approx(expected, abs=1e-8)


def _restrict_positive(piecewise: PiecewiseConstantAtom) -> PiecewiseConstantAtom:
    (bp,) = piecewise.breakpoints
    values = piecewise.values
    keep_bp = [0.0]
    keep_vals = []
    for lo, hi, v in zip(bp, bp[1:], values):
        if hi <= 0.0:
            continue
        keep_bp.append(hi)
        keep_vals.append(v)
    if keep_bp[-1] < math.pi:
        keep_bp.append(math.pi)
        keep_vals.append(0.0)
    tag = MeasureTag(MeasureKind.LEBESGUE, interval=(0.0, math.pi))
    return PiecewiseConstantAtom(tuple(keep_bp), keep_vals, tag,
                                 (0.0, math.pi), {})


class TestGram:
    @pytest.mark.parametrize("family", list(BasisFamily))
    def test_identity_for_moderate_params(self, family):
        p = JacobiParams(0.5, 0.25)
        gram = gram_matrix(family, p, 12)
        assert np.max(np.abs(gram - np.eye(12))) < 1e-10
