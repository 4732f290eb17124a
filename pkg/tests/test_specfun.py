import math

import numpy as np
import pytest
from scipy.special import gammaln, jv

from jacobilab.errors import DomainError, TruncationError
from jacobilab.specfun import Tolerance, bessel_j, log_gamma

TIGHT = Tolerance(rel=1e-15, abs=0.0, max_terms=400)


class TestTolerance:
    def test_defaults_valid(self):
        tol = Tolerance()
        assert tol.rel > 0 and tol.abs >= 0 and tol.max_terms >= 1

    @pytest.mark.parametrize("kwargs", [
        {"rel": 0.0}, {"rel": -1e-3}, {"abs": -1.0}, {"max_terms": 0},
        {"rel": math.inf},
    ])
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            Tolerance(**kwargs)


class TestLogGamma:
    def test_gamma_one(self):
        assert log_gamma(1.0) == 0.0

    def test_gamma_five_is_log_24(self):
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-15)

    def test_gamma_half_via_duplication(self):
        # duplication formula at x = 1/2: Gamma(1/2) = sqrt(pi) Gamma(1) / Gamma(1)
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.nan, math.inf])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x)

    def test_relative_accuracy_against_scipy(self):
        xs = np.geomspace(1e-3, 1e4, 400)
        for x in xs:
            ref = float(gammaln(x))
            assert log_gamma(float(x)) == pytest.approx(ref, rel=1e-13, abs=1e-13)

    def test_functional_equation(self):
        for x in np.linspace(0.1, 100.0, 333):
            lhs = log_gamma(float(x) + 1.0)
            rhs = log_gamma(float(x)) + math.log(x)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestBesselJ:
    def test_at_zero(self):
        assert bessel_j(0.0, 0.0) == 1.0
        assert bessel_j(1.3, 0.0) == 0.0
        assert bessel_j(-0.5, 0.0) == math.inf

    @pytest.mark.parametrize("z", [0.5, 1.0, 2.0])
    def test_minus_half_closed_form(self, z):
        closed = math.sqrt(2.0 / (math.pi * z)) * math.cos(z)
        assert bessel_j(-0.5, z, TIGHT) == pytest.approx(closed, rel=1e-13)
        # independent oracle for the same values
        assert bessel_j(-0.5, z, TIGHT) == pytest.approx(float(jv(-0.5, z)), rel=1e-13)

    def test_small_argument_power_law(self):
        nu, z = 0.7, 1e-4
        ratio = bessel_j(nu, z, TIGHT) / z**nu
        assert ratio == pytest.approx(2.0**-nu / math.gamma(nu + 1.0), rel=1e-8)

    @pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 1.3])
    def test_three_term_recurrence(self, nu):
        # centered at nu+1 so every order stays above -1
        for z in np.linspace(0.25, 40.0, 160):
            z = float(z)
            j0 = bessel_j(nu, z, TIGHT)
            j1 = bessel_j(nu + 1.0, z, TIGHT)
            j2 = bessel_j(nu + 2.0, z, TIGHT)
            lhs = j0 + j2
            rhs = 2.0 * (nu + 1.0) / z * j1
            scale = max(abs(j0), abs(j1), abs(j2), 1e-3)
            assert abs(lhs - rhs) <= 1e-9 * scale

    def test_accuracy_large_argument(self):
        for nu, z in [(0.0, 40.0), (1.3, 37.0), (0.5, 60.0)]:
            assert bessel_j(nu, z, TIGHT) == pytest.approx(float(jv(nu, z)), rel=1e-12)

    def test_domain_and_truncation(self):
        with pytest.raises(DomainError):
            bessel_j(0.0, -1.0)
        with pytest.raises(DomainError):
            bessel_j(-1.0, 1.0)
        with pytest.raises(TruncationError):
            bessel_j(0.0, 5.0, Tolerance(rel=1e-15, max_terms=3))
