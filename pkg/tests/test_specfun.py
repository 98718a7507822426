import math

import mpmath as mp
import numpy as np
import pytest

from golden import K1_3, K2_3, K3_3, K_HALF_1, U_1_1_1
from steinpairs.errors import ConvergenceError, DomainError
from steinpairs.specfun import (
    SpecfunResult,
    bessel_k,
    log_bessel_k,
    log_gamma,
    log_tricomi_u,
    tricomi_u,
)

# Documented oracle grids (integral representations evaluated by mpmath).
K_ORDERS = [0.0, 0.3, 1.0, 2.5, 7.0, 15.0]
K_ARGS = [0.01, 0.5, 2.0, 10.0, 100.0]
U_A = [0.5, 1.0, 2.5, 7.0]
U_B = [-3.5, 0.0, 1.0, 2.5, 10.0]
U_Z = [0.1, 1.0, 5.0, 30.0]


def _k_oracle(p, x):
    """log K_p(x) from int_0^inf exp(-x cosh t) cosh(p t) dt."""
    with mp.workdps(30):
        # the integrand is below exp(-x cosh T) beyond T; stop where that is negligible
        T = float(mp.acosh(1 + 800 / x)) + 1
        f = lambda t: mp.exp(-x * (mp.cosh(t) - 1)) * mp.cosh(p * t)
        val = mp.quad(f, mp.linspace(0, T, 9))
        return float(mp.log(val) - x)


def _u_oracle(a, b, z):
    """log U(a,b,z) from (1/Gamma(a)) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.

    The substitution t = u^(1/a) removes the t^(a-1) endpoint singularity.
    """
    with mp.workdps(30):
        def f(u):
            t = u ** (mp.mpf(1) / a)
            return mp.exp(-z * t) * (1 + t) ** (b - a - 1) / a

        edge = (mp.mpf(1) / z) ** a
        val = mp.quad(f, [0, edge / 10, edge, 10 * edge, 100 * edge, mp.inf])
        return float(mp.log(val) - mp.loggamma(a))


class TestBesselK:
    def test_half_order_closed_form(self):
        r = bessel_k(0.5, 1.0)
        assert r.converged
        assert float(r) == pytest.approx(K_HALF_1, rel=1e-12)
        assert float(r) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-12)

    def test_even_in_order(self):
        for p in [0.5, 0.3, 2.0, 7.7, 33.0]:
            for x in [1e-6, 0.1, 1.0, 2.0, 50.0, 700.0]:
                a, b = bessel_k(p, x), bessel_k(-p, x)
                assert (a.value, a.log_scale) == (b.value, b.log_scale)

    def test_recurrence_golden(self):
        k1, k2, k3 = (float(bessel_k(p, 3.0)) for p in (1, 2, 3))
        assert k1 == pytest.approx(K1_3, rel=1e-12)
        assert k2 == pytest.approx(K2_3, rel=1e-12)
        assert k3 == pytest.approx(K3_3, rel=1e-12)
        assert k3 == pytest.approx(k1 + (4.0 / 3.0) * k2, rel=1e-10)

    @pytest.mark.parametrize("p", np.linspace(-10, 10, 21).tolist() + [-9.5, 0.25, 3.7])
    def test_recurrence_residual(self, p):
        for x in np.geomspace(0.1, 100, 25):
            km, k0, kp = (bessel_k(p + d, x) for d in (-1, 0, 1))
            # bring everything to K_{p+1}'s scale
            ref = kp.log_scale
            vm = km.value * math.exp(km.log_scale - ref)
            v0 = k0.value * math.exp(k0.log_scale - ref)
            resid = abs(kp.value - vm - (2 * p / x) * v0) / kp.value
            assert resid < 1e-10, (p, x, resid)

    @pytest.mark.parametrize("p", K_ORDERS)
    def test_integral_representation(self, p):
        for x in K_ARGS:
            assert bessel_k(p, x).log_value == pytest.approx(_k_oracle(p, x), abs=1e-8)

    def test_against_mpmath_wide_range(self):
        worst = 0.0
        for p in [0, 0.5, 1, 2.5, 10.2, 30, 50]:
            for x in [1e-6, 1e-3, 0.3, 1.99, 2.01, 20, 300, 700]:
                ref = float(mp.log(mp.besselk(p, x)))
                worst = max(worst, abs(bessel_k(p, x).log_value - ref))
        # 1e-12 relative on the value is 1e-12 absolute on the log
        assert worst < 1e-12

    def test_strictly_decreasing_in_x(self):
        for p in [0.0, 0.5, 3.0, 20.0]:
            xs = np.geomspace(1e-4, 600, 300)
            logs = [bessel_k(p, x).log_value for x in xs]
            assert np.all(np.diff(logs) < 0)

    def test_large_order_small_argument_no_overflow(self):
        r = bessel_k(50.0, 1e-6)
        assert r.converged and math.isfinite(r.log_value)
        assert float(r) == math.inf  # the value itself is beyond double range
        assert r.log_value == pytest.approx(float(mp.log(mp.besselk(50, 1e-6))), abs=1e-12)

    def test_domain(self):
        for x in [0.0, -1.0, math.nan, math.inf]:
            with pytest.raises(DomainError):
                bessel_k(1.0, x)

    def test_budget_exhaustion_is_flagged(self, monkeypatch):
        r = bessel_k(0.3, 1.0, max_terms=2)
        assert not r.converged
        from steinpairs import specfun

        orig = specfun.bessel_k
        monkeypatch.setattr(specfun, "bessel_k", lambda p, x: orig(p, x, max_terms=2))
        with pytest.raises(ConvergenceError):
            log_bessel_k(0.3, 1.0)


class TestTricomiU:
    @pytest.mark.parametrize("z", [0.5, 1.0, 2.0])
    def test_u_1_2_is_reciprocal(self, z):
        assert float(tricomi_u(1.0, 2.0, z)) == pytest.approx(1.0 / z, rel=1e-10)

    def test_u_1_1_1(self):
        assert float(tricomi_u(1.0, 1.0, 1.0)) == pytest.approx(U_1_1_1, rel=1e-10)

    @pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
    def test_kummer_transformation(self, a):
        for b in [0.0, -2.5, 0.7]:
            for z in [0.3, 2.0, 17.0]:
                lhs = tricomi_u(a, b, z).log_value
                rhs = (1 - b) * math.log(z) + tricomi_u(a - b + 1, 2 - b, z).log_value
                assert lhs == pytest.approx(rhs, abs=1e-9)

    @pytest.mark.parametrize("a", U_A)
    def test_integral_representation(self, a):
        for b in U_B:
            for z in U_Z:
                assert tricomi_u(a, b, z).log_value == pytest.approx(_u_oracle(a, b, z), abs=1e-8), (a, b, z)

    def test_against_mpmath_documented_range(self):
        worst = 0.0
        for a in [0.01, 0.5, 2.0, 13.0, 50.0]:
            for b in [-50.0, -10.5, 0.0, 1.0, 3.3, 25.5, 50.0]:
                for z in [1e-4, 0.05, 1.0, 40.0, 500.0]:
                    r = tricomi_u(a, b, z)
                    assert r.converged
                    ref = float(mp.log(mp.hyperu(a, b, z)))
                    worst = max(worst, abs(r.log_value - ref))
        assert worst < 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            tricomi_u(0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            tricomi_u(1.0, 1.0, 0.0)
        with pytest.raises(DomainError):
            tricomi_u(1.0, math.nan, 1.0)

    def test_budget_exhaustion_is_flagged(self, monkeypatch):
        r = tricomi_u(2.0, 1.5, 0.01, max_steps=3)
        assert not r.converged
        from steinpairs import specfun

        orig = specfun.tricomi_u
        monkeypatch.setattr(specfun, "tricomi_u", lambda a, b, z: orig(a, b, z, max_steps=3))
        with pytest.raises(ConvergenceError):
            log_tricomi_u(2.0, 1.5, 0.01)


class TestLogGamma:
    def test_values(self):
        assert log_gamma(1.0) == 0.0
        assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-12)
        assert log_gamma(10.0) == pytest.approx(math.log(362880.0), abs=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x)


def test_result_helpers():
    r = SpecfunResult(2.0, 3.0, True, 1)
    assert r.log_value == pytest.approx(math.log(2.0) + 3.0)
    assert float(r) == pytest.approx(2.0 * math.exp(3.0))
    assert float(SpecfunResult(1.0, 1e6, True, 1)) == math.inf
