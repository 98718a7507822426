import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

import golden
from params import ALL_SETS, DECAY_SETS, GIG_SETS, KUMMER_SETS, label
from steinpairs import GigParams, KummerParams, gig_stein_pair, kummer_stein_pair, make_stein_pair, stein_pair, tau_zero
from steinpairs.distributions import (
    cdf,
    gig_log_density,
    gig_log_normalizer,
    kummer_log_density,
    kummer_log_normalizer,
    kummer_normalizer_diagnostics,
    log_density,
    params_from_dict,
)
from steinpairs.errors import DomainError, ParameterError, PreconditionError
from steinpairs.stein import boundary_decay


class TestParams:
    @pytest.mark.parametrize(
        "ctor,args,code",
        [
            (GigParams, (0.0, 0.0, 1.0), "gig.a_nonpositive"),
            (GigParams, (0.0, 1.0, -1.0), "gig.b_nonpositive"),
            (GigParams, (math.nan, 1.0, 1.0), "gig.p_not_finite"),
            (KummerParams, (-1.0, 0.0, 1.0), "kummer.a_nonpositive"),
            (KummerParams, (1.0, 0.0, 0.0), "kummer.c_nonpositive"),
            (KummerParams, (1.0, math.inf, 1.0), "kummer.b_not_finite"),
        ],
    )
    def test_invalid(self, ctor, args, code):
        with pytest.raises(ParameterError) as ei:
            ctor(*args)
        assert ei.value.code == code

    def test_round_trip(self):
        for p in ALL_SETS:
            assert params_from_dict(p.to_dict()) == p

    @pytest.mark.parametrize(
        "d,code",
        [
            ({"family": "beta"}, "params.unknown_family"),
            ({"family": "gig", "p": 1, "a": 1}, "gig.missing"),
            ({"family": "gig", "p": 1, "a": 1, "b": 1, "c": 2}, "gig.unexpected"),
            ({"family": "kummer", "a": "1", "b": 0, "c": 1}, "kummer.a_not_number"),
            ({"family": "kummer", "a": True, "b": 0, "c": 1}, "kummer.a_not_number"),
            ([1, 2], "params.not_object"),
        ],
    )
    def test_from_dict_errors(self, d, code):
        with pytest.raises(ParameterError) as ei:
            params_from_dict(d)
        assert ei.value.code == code

    def test_monotone_flags(self):
        assert GigParams(-1.0, 1.0, 1.0).monotone_tau
        assert not GigParams(-0.999, 1.0, 1.0).monotone_tau
        assert KummerParams(1.0, 0.0, 1.0).monotone_tau  # 1 - b - c = 0
        assert not KummerParams(1.0, -0.5, 1.0).monotone_tau


class TestGigDensity:
    def test_closed_form_value(self):
        p = GigParams(-0.5, 1.0, 1.0)
        assert float(gig_log_density(p, 1.0)) == pytest.approx(golden.GIG_HALF_LOG_AT_1, abs=1e-12)

    def test_left_tail_dominated_by_b_over_2x(self):
        p = GigParams(-1.0, 2.0, 2.0)
        x = np.array([1e-2, 1e-3, 1e-4, 1e-6])
        ld = gig_log_density(p, x)
        assert np.all(np.diff(ld) < 0)
        # ln g + b/(2x) is a slowly varying remainder
        rem = ld + 1.0 / x
        assert np.all(np.abs(rem) < 30)

    def test_normalizer_against_mpmath(self):
        for p in GIG_SETS:
            ref = mp.log(2 * mp.besselk(p.p, mp.sqrt(p.a * p.b))) - (p.p / 2) * mp.log(p.a / p.b)
            assert gig_log_normalizer(p) == pytest.approx(float(ref), abs=1e-11), label(p)

    @pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
    def test_outside_support_rejected(self, x):
        with pytest.raises(DomainError):
            gig_log_density(GigParams(-1.0, 2.0, 2.0), np.array([x, 1.0]))


class TestKummerDensity:
    def test_golden_value(self):
        p = KummerParams(1.0, 0.0, 1.0)
        assert float(kummer_log_density(p, 1.0)) == pytest.approx(golden.KUMMER_101_LOG_AT_1, abs=1e-12)
        assert math.exp(float(kummer_log_density(p, 1.0))) == pytest.approx(golden.KUMMER_101_AT_1, rel=1e-12)

    def test_density_ratio_is_exact(self):
        p = KummerParams(2.0, 1.0, 1.0)
        x, y = 0.7, 3.1
        ratio = (x / y) * ((1 + y) / (1 + x)) ** 3 * math.exp(-(x - y))
        assert math.exp(float(kummer_log_density(p, x)) - float(kummer_log_density(p, y))) == pytest.approx(ratio, rel=1e-14)

    def test_normalizer_matches_consistent_closed_form(self):
        for p in KUMMER_SETS:
            ref = float(mp.log(mp.gamma(p.a) * mp.hyperu(p.a, 1 - p.b, p.c)))
            assert kummer_log_normalizer(p) == pytest.approx(ref, abs=1e-11), label(p)

    def test_small_shape_normalizer(self):
        # x**(a-1) keeps mass at all scales down to 0 when a is tiny
        for p in (KummerParams(0.02, 12.0, 0.01), KummerParams(0.01, -3.0, 2.0)):
            ref = float(mp.log(mp.gamma(p.a) * mp.hyperu(p.a, 1 - p.b, p.c)))
            assert kummer_log_normalizer(p) == pytest.approx(ref, abs=1e-11)

    def test_alternative_closed_form_disagrees(self):
        d = kummer_normalizer_diagnostics(KummerParams(1.0, 0.0, 1.0))
        assert d["rel_diff_consistent"] < 1e-10
        assert d["rel_diff_alternative"] > 0.5
        assert math.exp(d["log_normalizer_quadrature"]) == pytest.approx(golden.U_1_1_1, rel=1e-12)


@pytest.mark.parametrize("p", ALL_SETS, ids=label)
def test_density_integrates_to_one(p):
    c = cdf(p, [1e3 * max(1.0, 1.0 / getattr(p, "c", getattr(p, "a", 1.0)))])
    assert float(c[0]) == pytest.approx(1.0, abs=1e-8)


class TestCdf:
    def test_monotone_and_bounded(self):
        p = KummerParams(1.0, 1.0, 1.0)
        x = np.geomspace(1e-4, 200, 60)
        c = cdf(p, x)
        assert np.all(np.diff(c) >= 0) and c[0] >= 0 and c[-1] <= 1.0

    def test_unsorted_input(self):
        p = GigParams(-1.0, 2.0, 2.0)
        x = np.array([2.0, 0.5, 1.0])
        np.testing.assert_allclose(cdf(p, x), cdf(p, np.sort(x))[[2, 0, 1]], rtol=0, atol=0)

    def test_against_mpmath(self):
        p = GigParams(-1.0, 2.0, 2.0)
        with mp.workdps(25):
            z = mp.quad(lambda t: t ** -2 * mp.exp(-(t + 1 / t)), [0, 0.5, 1, 2, mp.inf])
            ref = float(mp.quad(lambda t: t ** -2 * mp.exp(-(t + 1 / t)), [0, 0.5, 1]) / z)
        assert float(cdf(p, [1.0])[0]) == pytest.approx(ref, abs=1e-11)


class TestSteinPairs:
    def test_gig_alpha_example(self):
        pair = gig_stein_pair(GigParams(-1.0, 2.0, 2.0))
        assert pair.s == (0.0, 0.0, 1.0)
        assert pair.tau == (1.0, 0.0, -1.0)
        assert pair.alpha == pytest.approx(1.0, rel=1e-15)
        assert pair.monotone_tau

    def test_gig_alpha_second_example(self):
        pair = gig_stein_pair(GigParams(-2.0, 1.0, 1.0))
        assert pair.alpha == pytest.approx(math.sqrt(2) - 1, rel=1e-14)
        assert abs(float(pair.tau_at(pair.alpha))) < 1e-15

    def test_kummer_alpha_examples(self):
        pair = kummer_stein_pair(KummerParams(1.0, 1.0, 1.0))
        assert pair.s == (0.0, 1.0, 1.0)
        assert pair.alpha == pytest.approx(golden.KUMMER_111_ALPHA, rel=1e-15)
        edge = kummer_stein_pair(KummerParams(1.0, 0.0, 1.0))
        assert edge.monotone_tau and edge.alpha == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("p", ALL_SETS, ids=label)
    def test_alpha_against_brent(self, p):
        pair = stein_pair(p)
        if pair.alpha is None:
            return
        f = lambda x: float(pair.tau_at(x))
        hi = 1.0
        while f(hi) > 0:
            hi *= 2
        assert pair.alpha == pytest.approx(brentq(f, 0.0, hi, xtol=1e-300, rtol=1e-15), rel=1e-12)

    @pytest.mark.parametrize("p", ALL_SETS, ids=label)
    def test_s_positive_tau_at_zero(self, p):
        pair = stein_pair(p)
        x = np.geomspace(1e-6, 1e6, 50)
        assert np.all(pair.s_at(x) > 0)
        assert pair.tau[0] > 0

    @pytest.mark.parametrize("p", ALL_SETS, ids=label)
    def test_critical_points_are_density_extrema(self, p):
        pair = stein_pair(p)
        for c in pair.density_critical_points():
            h = 1e-4 * c
            lg = pair.log_g(np.array([c - h, c, c + h]))
            assert lg[1] >= max(lg[0], lg[2]) - 1e-12 or lg[1] <= min(lg[0], lg[2]) + 1e-12

    def test_with_tau_recomputes(self):
        pair = stein_pair(GigParams(-1.0, 2.0, 2.0))
        other = pair.with_tau((1.0, 0.5, -1.0))
        assert other.tau == (1.0, 0.5, -1.0)
        assert not other.monotone_tau
        assert other.log_normalizer == pair.log_normalizer

    def test_describe(self):
        d = stein_pair(KummerParams(1.0, 1.0, 1.0)).describe()
        assert d["family"] == "kummer" and d["tau"] == [1.0, -1.0, -1.0]

    def test_make_custom_pair(self):
        # exponential(1): s = 1, tau = -1 satisfies (s g)' = tau g
        pair = make_stein_pair((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), lambda x: -np.asarray(x, dtype=float))
        assert pair.alpha is None
        with pytest.raises(DomainError):
            make_stein_pair((0.0, -1.0, 0.0), (1.0, 0.0, 0.0), lambda x: x)


class TestTauZero:
    def test_examples(self):
        assert tau_zero(stein_pair(GigParams(-1.0, 2.0, 2.0))) == pytest.approx(1.0, rel=1e-15)
        assert tau_zero(stein_pair(KummerParams(1.0, 1.0, 1.0))) == pytest.approx(golden.KUMMER_111_ALPHA, rel=1e-15)

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            tau_zero(stein_pair(GigParams(0.0, 1.0, 1.0)))
        with pytest.raises(PreconditionError):
            tau_zero(stein_pair(KummerParams(1.0, -1.0, 1.0)))

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(-30.0, -1.0),
        st.floats(1e-3, 1e3),
        st.floats(1e-3, 1e3),
    )
    def test_gig_residual(self, p, a, b):
        t0, t1, t2 = 0.5 * b, p + 1.0, -0.5 * a
        from steinpairs.distributions import gig_alpha_closed_form

        alpha = gig_alpha_closed_form(GigParams(p, a, b))
        assert abs(t0 + t1 * alpha + t2 * alpha * alpha) < 1e-12 * max(1.0, abs(t0)) * 4

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 1e3), st.floats(-50.0, 50.0), st.floats(1e-3, 1e3))
    def test_kummer_residual(self, a, b, c):
        from steinpairs.distributions import kummer_alpha_closed_form

        if 1.0 - b - c > 0:
            return
        alpha = kummer_alpha_closed_form(KummerParams(a, b, c))
        t0, t1, t2 = a, 1.0 - b - c, -c
        assert abs(t0 + t1 * alpha + t2 * alpha * alpha) < 1e-12 * max(1.0, abs(t0)) * 4


@pytest.mark.parametrize("p", DECAY_SETS, ids=label)
def test_boundary_decay_values(p):
    pair = stein_pair(p)
    for x in (1e-8, 1e3):
        assert float(pair.log_sg(x)) < math.log(1e-12), (label(p), x)
    assert boundary_decay(pair)["ok"]


def test_log_density_dispatch():
    p = KummerParams(2.0, 1.0, 3.0)
    np.testing.assert_array_equal(log_density(p, [0.5, 2.0]), kummer_log_density(p, [0.5, 2.0]))
