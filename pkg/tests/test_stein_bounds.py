import math

import mpmath as mp
import numpy as np
import pytest

import golden
from params import ALL_SETS, MONOTONE_SETS, label
from steinpairs import GigParams, KummerParams, make_stein_pair, stein_pair
from steinpairs.distributions import cdf
from steinpairs.errors import PreconditionError
from steinpairs.stein import (
    bound_m,
    boundary_decay,
    check_lemma_inequalities,
    check_structural_identity,
    default_grid,
    tail_ratios,
)

GRID = default_grid()


class TestBound:
    def test_gig_golden(self):
        r = bound_m(stein_pair(GigParams(-1.0, 2.0, 2.0)))
        assert r.alpha == pytest.approx(1.0, rel=1e-15)
        assert r.left_ratio == pytest.approx(golden.GIG_M122_LEFT, rel=1e-10)
        assert r.right_ratio == pytest.approx(golden.GIG_M122_RIGHT, rel=1e-10)
        assert r.M == max(r.left_ratio, r.right_ratio)

    def test_kummer_golden(self):
        r = bound_m(stein_pair(KummerParams(1.0, 1.0, 1.0)))
        assert r.alpha == pytest.approx(golden.KUMMER_111_ALPHA, rel=1e-14)
        assert r.left_ratio == pytest.approx(golden.KUMMER_111_LEFT, rel=1e-10)
        assert r.right_ratio == pytest.approx(golden.KUMMER_111_RIGHT, rel=1e-10)
        assert 0 < r.M < math.inf

    def test_ratios_sum_to_inverse_sg(self):
        # left + right = 1 / (s g)(alpha) because the density integrates to 1
        for p in MONOTONE_SETS:
            pair = stein_pair(p)
            r = bound_m(pair)
            assert r.left_ratio + r.right_ratio == pytest.approx(math.exp(-float(pair.log_sg(r.alpha))), rel=1e-9), label(p)

    def test_hypothesis_gate(self):
        with pytest.raises(PreconditionError, match="p ≤ −1"):
            bound_m(stein_pair(GigParams(0.0, 1.0, 1.0)))
        with pytest.raises(PreconditionError, match="1−b−c ≤ 0"):
            bound_m(stein_pair(KummerParams(1.0, -1.0, 1.0)))

    def test_decay_gate(self):
        # Exponential(1) with s = 1: s g -> 1 at 0, so the bound does not apply
        pair = make_stein_pair((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), lambda x: -np.asarray(x, dtype=float))
        d = boundary_decay(pair)
        assert not d["at_zero"] and d["at_infinity"]
        pair2 = make_stein_pair((1.0, 0.0, 0.0), (1.0, -1.0, 0.0), lambda x: -np.asarray(x, dtype=float))
        with pytest.raises(PreconditionError):
            bound_m(pair2)

    @pytest.mark.parametrize("p", ALL_SETS, ids=label)
    def test_decay_holds_for_builtins(self, p):
        assert boundary_decay(stein_pair(p))["ok"]

    def test_to_dict(self):
        d = bound_m(stein_pair(GigParams(-1.0, 2.0, 2.0))).to_dict()
        assert set(d) == {"alpha", "left_ratio", "right_ratio", "M", "converged"}


class TestIdentity:
    @pytest.mark.parametrize("p", [GigParams(-0.5, 1.0, 1.0), KummerParams(2.0, 1.0, 3.0)], ids=label)
    def test_examples_pass(self, p):
        assert check_structural_identity(stein_pair(p), GRID, 1e-6).passed

    @pytest.mark.parametrize("p", ALL_SETS, ids=label)
    def test_corrupted_tau_fails(self, p):
        pair = stein_pair(p)
        bad = pair.with_tau((pair.tau[0] + 0.1,) + pair.tau[1:])
        rep = check_structural_identity(bad, GRID, 1e-6)
        assert not rep.passed and rep.max_error > 1e-3

    def test_report_fields(self):
        rep = check_structural_identity(stein_pair(KummerParams(1.0, 1.0, 1.0)), GRID)
        assert rep.errors.shape == GRID.shape and rep.worst_x in GRID
        assert rep.to_dict()["passed"] is True

    def test_wider_grid_kummer(self):
        # GIG is excluded: near 0 its log-density moves by b/(2x) * 1e-5 per
        # difference step, which no step proportional to x can resolve
        grid = np.geomspace(1e-6, 1e3, 300)
        for p in (KummerParams(1.0, 1.0, 1.0), KummerParams(12.0, -8.0, 6.0), KummerParams(0.3, 5.0, 0.2)):
            assert check_structural_identity(stein_pair(p), grid, 1e-6).passed, label(p)


class TestLemma:
    def test_gig_example_at_half(self):
        pair = stein_pair(GigParams(-1.0, 2.0, 2.0))
        lhs = float(cdf(pair.params, [0.5])[0])
        rhs = float(np.exp(pair.log_sg(0.5)) / pair.tau_at(0.5))
        assert lhs == pytest.approx(golden.GIG_M122_LEMMA_AT_HALF[0], rel=1e-10)
        assert rhs == pytest.approx(golden.GIG_M122_LEMMA_AT_HALF[1], rel=1e-12)
        assert lhs <= rhs

    def test_kummer_example_at_two(self):
        pair = stein_pair(KummerParams(1.0, 1.0, 1.0))
        l, u = tail_ratios(pair, np.array([2.0]))
        tail = float(u[0] * np.exp(pair.log_sg(2.0)))
        rhs = float(-np.exp(pair.log_sg(2.0)) / pair.tau_at(2.0))
        assert tail == pytest.approx(golden.KUMMER_111_LEMMA_AT_2[0], rel=1e-10)
        assert rhs == pytest.approx(golden.KUMMER_111_LEMMA_AT_2[1], rel=1e-12)
        assert tail <= rhs

    def test_alpha_excluded(self):
        pair = stein_pair(KummerParams(1.0, 1.0, 1.0))
        grid = np.sort(np.concatenate([GRID, [pair.alpha]]))
        rep = check_lemma_inequalities(pair, grid)
        assert rep.excluded_points >= 1
        assert rep.left_points + rep.right_points + rep.excluded_points == grid.size
        assert rep.passed

    @pytest.mark.parametrize("p", MONOTONE_SETS, ids=label)
    def test_all_monotone_sets(self, p):
        rep = check_lemma_inequalities(stein_pair(p), GRID)
        assert rep.passed, rep.to_dict()
        assert rep.left_max_ratio <= 1.0 + 1e-9 and rep.right_max_ratio <= 1.0 + 1e-9

    def test_ratios_against_mpmath(self):
        p = GigParams(-2.0, 1.0, 1.0)
        pair = stein_pair(p)
        xs = np.array([0.1, 0.3, 1.5, 6.0])
        l, u = tail_ratios(pair, xs)
        with mp.workdps(30):
            ug = lambda t: t ** -3 * mp.exp(-(t + 1 / t) / 2)
            for x, lv, uv in zip(xs, l, u):
                sg = x * x * ug(x)
                assert lv == pytest.approx(float(mp.quad(ug, [0, x / 2, x]) / sg), rel=1e-10)
                assert uv == pytest.approx(float(mp.quad(ug, [x, 2 * x, 10 * x, mp.inf]) / sg), rel=1e-10)

    def test_monotone_ratio_violation_is_detected(self):
        # a tau that is not the pair's own: the ratios no longer satisfy the inequalities
        pair = stein_pair(GigParams(-1.0, 2.0, 2.0))
        bad = pair.with_tau((3.0, 0.0, -1.0))
        assert not check_lemma_inequalities(bad, GRID).passed

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            check_lemma_inequalities(stein_pair(GigParams(1.0, 1.0, 1.0)), GRID)
