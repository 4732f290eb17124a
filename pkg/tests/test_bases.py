import math

import numpy as np
import pytest
from scipy.special import eval_jacobi

from jacobilab.bases import (BasisFamily, BasisSpec, JacobiParams, MultiIndex,
                             eigenvalue, jacobi_poly, normalizing_const,
                             normalizing_const_table, operator_apply_fd,
                             q_poly, q_poly_table, sym_trig_fun, sym_trig_poly,
                             tensor_eval, trig_fun, trig_fun_table, trig_poly,
                             trig_poly_deriv, trig_poly_table)
from jacobilab.errors import DomainError

CHEB = JacobiParams(-0.5, -0.5)
GRID = np.linspace(0.01, math.pi - 0.01, 61)

PARAM_SETS = [JacobiParams(-0.5, -0.5), JacobiParams(0.0, 0.0),
              JacobiParams(1.5, -0.3), JacobiParams(-0.7, -0.9)]


class TestParams:
    def test_eta(self):
        assert JacobiParams(1.0, 2.0).eta == 2.0
        assert JacobiParams(-0.5, -0.5).eta == 0.0

    def test_validation(self):
        with pytest.raises(DomainError):
            JacobiParams(-1.0, 0.0)
        with pytest.raises(DomainError):
            JacobiParams(0.0, -1.2)

    def test_function_family_needs_bounded_params(self):
        with pytest.raises(DomainError):
            BasisSpec(1, JacobiParams(-0.7, 0.0), BasisFamily.TRIG_FUN)
        BasisSpec(1, JacobiParams(-0.7, 0.0), BasisFamily.TRIG_POLY)

    def test_multi_index(self):
        n = MultiIndex((1, 0, 3))
        assert n.length == 4 and len(n) == 3
        with pytest.raises(ValueError):
            MultiIndex((1, -1))


class TestNormalizingConst:
    def test_k0_legendre(self):
        assert normalizing_const(0, JacobiParams(0.0, 0.0)) == pytest.approx(1.0, rel=1e-14)

    def test_k0_chebyshev(self):
        assert normalizing_const(0, CHEB) == pytest.approx(math.pi**-0.5, rel=1e-14)

    def test_k0_special_case_sum_minus_one(self):
        # alpha + beta = -1: the numerator reads Gamma(alpha+beta+2) = 1
        p = JacobiParams(0.25, -1.25 + 1.0)  # (0.25, -0.25)
        val = normalizing_const(0, p)
        direct = math.sqrt(1.0 * math.gamma(1.0)
                           / (math.gamma(1.25) * math.gamma(0.75)))
        assert val == pytest.approx(direct, rel=1e-13)

    def test_growth_like_sqrt_k(self):
        p = JacobiParams(0.5, -0.3)
        ratios = [normalizing_const(k, p) / math.sqrt(k + 1.0)
                  for k in [1, 10, 100, 1000, 10**4]]
        assert 0.5 < min(ratios) and max(ratios) < 3.0

    def test_overflow_safe_at_large_k(self):
        val = normalizing_const(10**6, JacobiParams(1.5, -0.3))
        assert math.isfinite(val) and val == pytest.approx(math.sqrt(2e6), rel=1e-2)

    def test_table_is_readonly(self):
        table = normalizing_const_table(16, CHEB)
        assert not table.flags.writeable
        assert table[3] == normalizing_const(3, CHEB)


class TestJacobiPoly:
    def test_degree_zero(self):
        assert jacobi_poly(0, JacobiParams(1.5, -0.3), 0.3) == 1.0

    @pytest.mark.parametrize("p", PARAM_SETS)
    def test_degree_one_closed_form(self, p):
        for x in np.linspace(-1, 1, 7):
            expected = (p.alpha + 1.0) + (p.alpha + p.beta + 2.0) * (x - 1.0) / 2.0
            assert jacobi_poly(1, p, float(x)) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("p", PARAM_SETS)
    def test_degree_two_closed_form(self, p):
        a, b = p.alpha, p.beta
        for x in np.linspace(-1, 1, 7):
            u = x - 1.0
            expected = ((a + 1.0) * (a + 2.0) / 2.0
                        + (a + 2.0) * (a + b + 3.0) * u / 2.0
                        + (a + b + 3.0) * (a + b + 4.0) * u * u / 8.0)
            assert jacobi_poly(2, p, float(x)) == pytest.approx(expected, rel=1e-13, abs=1e-13)

    def test_chebyshev_proportional_to_cos(self):
        for k in [1, 4, 9]:
            theta = GRID
            values = jacobi_poly(k, CHEB, np.cos(theta))
            ratio = values / np.cos(k * theta)
            # remove near-zero cosine points
            mask = np.abs(np.cos(k * theta)) > 0.2
            assert np.ptp(ratio[mask]) < 1e-10 * np.abs(ratio[mask]).max()

    @pytest.mark.parametrize("p", PARAM_SETS)
    @pytest.mark.parametrize("k", [3, 8, 17])
    def test_against_scipy(self, p, k):
        x = np.linspace(-1, 1, 11)
        ref = eval_jacobi(k, p.alpha, p.beta, x)
        mine = jacobi_poly(k, p, x)
        assert np.max(np.abs(mine - ref)) < 1e-11 * max(1.0, np.abs(ref).max())

    def test_domain(self):
        with pytest.raises(DomainError):
            jacobi_poly(2, CHEB, 1.5)


class TestTrigFamilies:
    def test_trig_poly_constant_family(self):
        p = JacobiParams(0.0, 0.0)
        assert trig_poly(0, p, 1.234) == pytest.approx(1.0, rel=1e-14)

    def test_trig_poly_chebyshev(self):
        for k in [1, 7, 32]:
            expected = math.sqrt(2.0 / math.pi) * np.cos(k * GRID)
            got = trig_poly_table(k, CHEB, GRID)[k]
            assert np.max(np.abs(got - expected)) < 1e-12

    @pytest.mark.parametrize("p", PARAM_SETS)
    def test_polynomial_envelope(self, p):
        kmax = 2048
        theta = np.linspace(math.pi / 512, math.pi * 511 / 512, 512)
        table = np.abs(trig_poly_table(kmax, p, theta))
        s = max(p.alpha, p.beta, -0.5) + 0.5
        sup = table.max(axis=1)
        ratios = sup / (np.arange(kmax + 1) + 1.0) ** s
        assert ratios.max() < 10.0

    def test_trig_fun_chebyshev_reduces_to_poly(self):
        vals_f = trig_fun_table(8, CHEB, GRID)
        vals_p = trig_poly_table(8, CHEB, GRID)
        assert np.max(np.abs(vals_f - vals_p)) < 1e-14

    def test_trig_fun_order_zero_half(self):
        p = JacobiParams(0.5, 0.5)
        expected = math.sqrt(2.0 / math.pi) * np.sin(GRID)
        got = trig_fun_table(0, p, GRID)[0]
        assert np.max(np.abs(got - expected)) < 1e-13

    @pytest.mark.parametrize("p", [JacobiParams(-0.5, -0.5), JacobiParams(0.0, 0.0),
                                   JacobiParams(1.5, -0.3)])
    def test_function_envelope_bounded(self, p):
        theta = np.linspace(math.pi / 512, math.pi * 511 / 512, 512)
        table = np.abs(trig_fun_table(2048, p, theta))
        assert table.max() < 5.0

    def test_q_poly_at_right_angle(self):
        p = JacobiParams(0.3, -0.2)
        expected = 0.5 * trig_poly(5, p.shifted(), math.pi / 2)
        assert q_poly(5, p, math.pi / 2) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("p", PARAM_SETS)
    def test_q_envelope(self, p):
        theta = np.linspace(math.pi / 512, math.pi * 511 / 512, 512)
        table = np.abs(q_poly_table(2048, p, theta))
        s = max(p.alpha, p.beta, -0.5) + 0.5
        ratios = table.max(axis=1) / (np.arange(2049) + 1.0) ** s
        assert ratios.max() < 10.0

    def test_swap_symmetry_in_absolute_value(self):
        p = JacobiParams(0.7, -0.2)
        q = p.swapped()
        for k in [0, 3, 11]:
            lhs = np.abs(trig_poly_table(k, p, GRID)[k])
            rhs = np.abs(trig_poly_table(k, q, math.pi - GRID)[k])
            assert np.max(np.abs(lhs - rhs)) < 1e-10


class TestDerivative:
    def test_order_zero_vanishes(self):
        assert trig_poly_deriv(0, JacobiParams(0.3, 0.1), 1.2) == 0.0

    @pytest.mark.parametrize("p", PARAM_SETS)
    @pytest.mark.parametrize("k", [1, 5, 20])
    def test_matches_finite_differences(self, p, k):
        h = 1e-5
        for theta in [0.5, 1.5, 2.5]:
            fd = (trig_poly(k, p, theta + h) - trig_poly(k, p, theta - h)) / (2 * h)
            exact = trig_poly_deriv(k, p, theta)
            assert exact == pytest.approx(fd, rel=1e-7, abs=1e-6)

    @pytest.mark.parametrize("p", PARAM_SETS)
    def test_derivative_envelope(self, p):
        theta = np.linspace(math.pi / 256, math.pi * 255 / 256, 256)
        s = max(p.alpha, p.beta, -0.5) + 1.5
        for k in [16, 128, 1024]:
            sup = np.abs(trig_poly_deriv(k, p, theta)).max()
            assert sup / (k + 1.0) ** s < 10.0


class TestSymmetrized:
    def test_even_parity(self):
        p = JacobiParams(0.4, -0.1)
        theta = np.linspace(0.1, 3.0, 9)
        assert np.allclose(sym_trig_poly(6, p, theta), sym_trig_poly(6, p, -theta),
                           rtol=0, atol=1e-15)

    def test_odd_parity(self):
        p = JacobiParams(0.4, -0.1)
        theta = np.linspace(0.1, 3.0, 9)
        assert np.allclose(sym_trig_poly(7, p, theta), -sym_trig_poly(7, p, -theta),
                           rtol=0, atol=1e-15)

    def test_odd_reduces_to_q(self):
        p = JacobiParams(0.4, -0.1)
        for theta in [-2.0, -0.3, 0.7, 2.9]:
            m = 4
            expected = math.copysign(1.0, theta) * q_poly(m, p, abs(theta)) / math.sqrt(2.0)
            assert sym_trig_poly(2 * m + 1, p, theta) == pytest.approx(expected, rel=1e-13)

    def test_sym_fun_order_zero_chebyshev(self):
        val = sym_trig_fun(0, CHEB, 1.1)
        assert val == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-13)

    def test_sym_fun_odd_at_origin(self):
        assert sym_trig_fun(3, JacobiParams(0.0, 0.0), 0.0) == 0.0

    def test_sym_fun_parity(self):
        p = JacobiParams(0.0, 0.5)
        theta = np.linspace(0.2, 2.8, 7)
        assert np.allclose(sym_trig_fun(4, p, theta), sym_trig_fun(4, p, -theta))
        assert np.allclose(sym_trig_fun(5, p, theta), -sym_trig_fun(5, p, -theta))


class TestEigen:
    def test_chebyshev_squares(self):
        for k in range(5):
            assert eigenvalue(k, CHEB) == float(k * k)

    def test_legendre_quarter(self):
        assert eigenvalue(0, JacobiParams(0.0, 0.0)) == 0.25

    def test_integer_case(self):
        assert eigenvalue(3, JacobiParams(1.0, 2.0)) == 25.0

    @pytest.mark.parametrize("family,builder", [
        ("poly", trig_poly), ("fun", trig_fun)])
    @pytest.mark.parametrize("k", [1, 3, 6])
    def test_operator_eigen_equation(self, family, builder, k):
        p = JacobiParams(0.6, 0.2)
        for theta in [0.9, 1.7, 2.3]:
            applied = operator_apply_fd(family, k, p, theta, h=1e-4)
            expected = eigenvalue(k, p) * builder(k, p, theta)
            assert applied == pytest.approx(expected, rel=1e-4, abs=1e-6)

    def test_operator_constant_eigenfunction(self):
        p = JacobiParams(0.0, 0.0)
        applied = operator_apply_fd("poly", 0, p, 1.3, h=1e-4)
        assert applied == pytest.approx(0.25 * trig_poly(0, p, 1.3), rel=1e-6, abs=1e-7)

    def test_operator_domain(self):
        with pytest.raises(DomainError):
            operator_apply_fd("poly", 1, CHEB, 1e-6, h=1e-4)


class TestTensor:
    def test_constant_product(self):
        spec = BasisSpec(2, JacobiParams(0.0, 0.0), BasisFamily.TRIG_POLY)
        assert tensor_eval(spec, (0, 0), (0.7, 2.1)) == pytest.approx(1.0, rel=1e-14)

    def test_matches_axis_product(self):
        p1, p2 = JacobiParams(0.5, 0.0), JacobiParams(1.5, -0.3)
        spec = BasisSpec(2, (p1, p2), BasisFamily.TRIG_POLY)
        point = (0.9, 1.9)
        direct = tensor_eval(spec, (3, 5), point)
        manual = trig_poly(3, p1, point[0]) * trig_poly(5, p2, point[1])
        assert direct == pytest.approx(manual, rel=1e-14)

    def test_chebyshev_two_dim(self):
        spec = BasisSpec(2, CHEB, BasisFamily.TRIG_FUN)
        for n in [(1, 1), (2, 5)]:
            val = tensor_eval(spec, n, (0.8, 1.4))
            expected = (2.0 / math.pi) * math.cos(n[0] * 0.8) * math.cos(n[1] * 1.4)
            assert val == pytest.approx(expected, rel=1e-12)

    def test_dimension_mismatch(self):
        spec = BasisSpec(2, JacobiParams(0.0, 0.0), BasisFamily.TRIG_POLY)
        with pytest.raises(ValueError):
            tensor_eval(spec, (1, 2, 3), (0.5, 0.5))
