import math

import numpy as np
import pytest
from scipy.special import roots_jacobi

from jacobilab.bases import JacobiParams, trig_poly
from jacobilab.errors import AccuracyError, DomainError
from jacobilab.quadrature import (MeasureKind, MeasureTag, QuadratureRule,
                                  gauss_jacobi_rule, integrate_lebesgue,
                                  integrate_mu, integrate_mu_tilde,
                                  interval_mass, ladder_edges, mu_rule,
                                  mu_total_mass, rho_total_mass,
                                  weighted_lebesgue_nodes)
from jacobilab.specfun import Tolerance

LEG = JacobiParams(0.0, 0.0)
HARD = JacobiParams(-0.7, -0.9)
PARAM_SETS = [JacobiParams(-0.5, -0.5), LEG, JacobiParams(1.5, -0.3), HARD]


class TestRuleConstruction:
    def test_one_node_legendre(self):
        rule = gauss_jacobi_rule(1, LEG)
        assert rule.nodes[0] == pytest.approx(0.0, abs=1e-15)
        assert rule.weights[0] == pytest.approx(2.0, rel=1e-14)

    def test_two_node_legendre(self):
        rule = gauss_jacobi_rule(2, LEG)
        assert np.allclose(np.sort(rule.nodes), [-1 / math.sqrt(3), 1 / math.sqrt(3)],
                           atol=1e-14)
        assert np.allclose(rule.weights, [1.0, 1.0], atol=1e-14)

    def test_total_weight_is_beta_mass(self):
        p = JacobiParams(0.5, -0.3)
        rule = gauss_jacobi_rule(9, p)
        expected = (2.0 ** (p.alpha + p.beta + 1.0)
                    * math.gamma(p.alpha + 1) * math.gamma(p.beta + 1)
                    / math.gamma(p.alpha + p.beta + 2))
        assert rule.weights.sum() == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("p", PARAM_SETS)
    @pytest.mark.parametrize("m", [4, 17])
    def test_against_scipy(self, p, m):
        rule = gauss_jacobi_rule(m, p)
        xs, ws = roots_jacobi(m, p.alpha, p.beta)
        assert np.max(np.abs(np.sort(rule.nodes) - np.sort(xs))) < 1e-12
        assert np.max(np.abs(rule.weights - ws)) < 1e-12 * ws.max()

    @pytest.mark.parametrize("p", PARAM_SETS)
    def test_monomial_exactness(self, p):
        # oracle: moments from a larger rule (degree-exactness transfer)
        m = 6
        rule = gauss_jacobi_rule(m, p)
        big = gauss_jacobi_rule(m + 8, p)
        for j in range(2 * m):
            mine = float(np.dot(rule.weights, rule.nodes**j))
            ref = float(np.dot(big.weights, big.nodes**j))
            assert mine == pytest.approx(ref, rel=1e-12, abs=1e-13)

    def test_rule_validation(self):
        rule = gauss_jacobi_rule(3, LEG)
        with pytest.raises(ValueError):
            QuadratureRule(rule.nodes, -rule.weights, rule.measure, 5)
        with pytest.raises(ValueError):
            QuadratureRule(rule.nodes, rule.weights * 1.5, rule.measure, 5)

    def test_mu_rule_integrates_polynomials(self):
        p = JacobiParams(0.5, -0.3)
        rule = mu_rule(8, p)
        direct = integrate_mu(lambda t: np.cos(t) ** 3, p)
        assert rule.apply(lambda t: np.cos(t) ** 3) == pytest.approx(direct, abs=1e-12)


class TestMeasures:
    def test_mass_relation(self):
        for p in PARAM_SETS:
            assert rho_total_mass(p) == pytest.approx(
                2.0 ** (p.alpha + p.beta + 1.0) * mu_total_mass(p), rel=1e-14)

    def test_tag_defaults(self):
        tag = MeasureTag(MeasureKind.MU, LEG)
        assert tag.interval == (0.0, math.pi)
        with pytest.raises(ValueError):
            MeasureTag(MeasureKind.MU)

    def test_interval_mass_matches_quadrature(self):
        tag = MeasureTag(MeasureKind.MU, HARD)
        direct = integrate_mu(lambda t: np.ones_like(t), HARD, 0.3, 2.0)
        assert interval_mass(tag, 0.3, 2.0) == pytest.approx(direct, rel=1e-10)

    def test_symmetrized_total_is_double(self):
        for p in PARAM_SETS:
            total = integrate_mu_tilde(lambda t: np.ones_like(t), p)
            assert total == pytest.approx(2.0 * mu_total_mass(p), rel=1e-10)


class TestIntegrateMu:
    @pytest.mark.parametrize("p,expected", [
        (JacobiParams(-0.5, -0.5), math.pi), (LEG, 1.0)])
    def test_unit_mass(self, p, expected):
        assert integrate_mu(lambda t: np.ones_like(t), p) == pytest.approx(
            expected, rel=1e-12)

    def test_degree_one_orthogonal_to_constants(self):
        p = JacobiParams(0.5, -0.3)
        val = integrate_mu(lambda t: trig_poly(1, p, t), p)
        assert abs(val) < 1e-12

    @pytest.mark.parametrize("p", PARAM_SETS)
    def test_orthonormality_sample(self, p):
        for j, k in [(0, 0), (2, 2), (0, 3), (5, 2), (7, 7)]:
            val = integrate_mu(lambda t: trig_poly(j, p, t) * trig_poly(k, p, t), p)
            assert val == pytest.approx(1.0 if j == k else 0.0, abs=1e-10)

    def test_change_of_measure(self):
        p = JacobiParams(0.5, -0.3)
        f = lambda t: np.exp(np.cos(t))
        lhs = integrate_mu(f, p)
        rule = gauss_jacobi_rule(40, p)
        rhs = 2.0 ** (-(p.alpha + p.beta + 1.0)) * float(
            np.dot(rule.weights, f(np.arccos(rule.nodes))))
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_additivity(self):
        c = 1.1
        f = lambda t: np.cos(t)
        total = integrate_mu(f, HARD)
        parts = integrate_mu(f, HARD, 0.0, c) + integrate_mu(f, HARD, c, math.pi)
        assert total == pytest.approx(parts, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            integrate_mu(lambda t: t, LEG, 2.0, 1.0)

    def test_cusp_hint_lebesgue(self):
        # integral of theta^0.2 on (0, 1): 1/1.2
        val = integrate_lebesgue(lambda t: t**0.2, 0.0, 1.0, s_left=0.2)
        assert val == pytest.approx(1.0 / 1.2, rel=1e-11)

    def test_right_cusp_flip(self):
        val = integrate_lebesgue(lambda t: (1.0 - t) ** -0.4, 0.0, 1.0,
                                 s_right=-0.4)
        assert val == pytest.approx(1.0 / 0.6, rel=1e-10)

    def test_jump_is_localized_by_bisection(self):
        jump = math.pi / math.e
        f = lambda t: np.where(t < jump, 0.0, 1.0)
        val = integrate_lebesgue(f, 0.0, math.pi, Tolerance(rel=1e-12, abs=0.0))
        assert val == pytest.approx(math.pi - jump, rel=1e-9)

    def test_unresolvable_oscillation_raises_with_estimate(self):
        f = lambda t: np.sin(1e12 * t)
        with pytest.raises(AccuracyError) as info:
            integrate_lebesgue(f, 0.0, math.pi, Tolerance(rel=1e-13, abs=0.0))
        assert info.value.estimate is not None
        assert info.value.error_bound > 0.0


class TestLadder:
    def test_edges_shape(self):
        edges = ladder_edges(1.0)
        assert edges[0] == 0.0 and edges[-1] == 1.0
        assert np.all(np.diff(edges) > 0)
        assert edges[1] <= 4 * 2e-6

    def test_tiny_interval_single_panel(self):
        edges = ladder_edges(1e-6)
        assert len(edges) == 2

    def test_weighted_lebesgue_nodes_integrate_weighted_polys(self):
        p = JacobiParams(0.5, -0.3)
        nodes, weights = weighted_lebesgue_nodes(12, p)
        tag = MeasureTag(MeasureKind.MU, p)
        # integrand: mu-density times cos^2; compare against mu integral
        val = float(np.dot(weights, tag.density(nodes) * np.cos(nodes) ** 2))
        ref = integrate_mu(lambda t: np.cos(t) ** 2, p)
        assert val == pytest.approx(ref, rel=1e-12)
