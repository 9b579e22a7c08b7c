"""Tests for the binary-entropy calculus.

Expected values marked as derived were computed with an independent root
finder (scipy.optimize.brentq on the entropy formula) and frozen here.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimsurgery.entropy import (
    CASE1,
    CASE2,
    BoundCurves,
    ScheduleError,
    bound_curves,
    buffer_schedule,
    case_select,
    chord_line,
    drop_profile,
    entropy,
    entropy_deriv,
    entropy_inv,
    raise_profile,
    tangent_line,
    uplift_gap,
    verify_concavity_lemma,
    verify_convexity_lemma,
)

# Independent brentq oracles, frozen.
HINV_HALF = 0.11002786443835955
H_011 = 0.499915958164528
M_05_01 = 0.7415359984074191

unit_floats = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestEntropy:
    def test_half_is_one(self):
        assert entropy(0.5) == 1.0

    def test_endpoints(self):
        assert entropy(0.0) == 0.0
        assert entropy(1.0) == 0.0

    def test_near_tenth(self):
        assert abs(entropy(0.11) - 0.4999) < 1e-3
        assert entropy(0.11) == pytest.approx(H_011, abs=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            entropy(-0.1)
        with pytest.raises(ValueError):
            entropy(1.0001)
        with pytest.raises(ValueError):
            entropy(float("nan"))

    @given(unit_floats)
    @settings(deadline=None)
    def test_symmetry(self, p):
        assert entropy(p) == pytest.approx(entropy(1.0 - p), abs=1e-12)

    def test_array_matches_scalar(self):
        ps = np.linspace(0.0, 1.0, 101)
        vec = entropy(ps)
        for p, v in zip(ps, vec):
            assert v == pytest.approx(entropy(float(p)), abs=1e-15)


class TestEntropyInv:
    def test_one_is_half_exactly(self):
        assert entropy_inv(1.0) == 0.5

    def test_zero(self):
        assert entropy_inv(0.0) == 0.0

    def test_half(self):
        assert entropy_inv(0.5) == pytest.approx(HINV_HALF, abs=1e-12)
        assert abs(entropy_inv(0.5) - 0.110) < 1e-3

    def test_half_complement_near_point_four(self):
        assert 0.385 <= 0.5 - entropy_inv(0.5) <= 0.395

    @given(unit_floats)
    @settings(deadline=None, max_examples=300)
    def test_round_trip(self, y):
        x = entropy_inv(y)
        assert 0.0 <= x <= 0.5
        assert abs(entropy(x) - y) <= 1e-12

    @given(unit_floats, unit_floats)
    @settings(deadline=None)
    def test_monotone(self, a, b):
        lo, hi = min(a, b), max(a, b)
        assert entropy_inv(lo) <= entropy_inv(hi)

    def test_vectorized_round_trip(self):
        ys = np.random.default_rng(7).uniform(0.0, 1.0, 20_000)
        xs = entropy_inv(ys)
        assert np.max(np.abs(entropy(xs) - ys)) <= 1e-12

    def test_superadditivity_grid(self):
        # entropy_inv(t) - entropy_inv(s) >= entropy_inv(t - s), 1e3 x 1e3 grid
        g = np.linspace(0.0, 1.0, 1001)
        s, t = np.meshgrid(g, g)
        keep = s <= t
        s, t = s[keep], t[keep]
        lhs = np.asarray(entropy_inv(t)) - np.asarray(entropy_inv(s))
        rhs = np.asarray(entropy_inv(t - s))
        assert np.min(lhs - rhs) >= -1e-12


class TestEntropyDeriv:
    def test_max_is_flat(self):
        assert entropy_deriv(0.5) == 0.0

    def test_quarter(self):
        assert entropy_deriv(0.25) == pytest.approx(math.log2(3), abs=1e-14)

    def test_antisymmetry(self):
        assert entropy_deriv(0.75) == pytest.approx(-math.log2(3), abs=1e-14)

    def test_domain(self):
        for bad in (0.0, 1.0, -0.5):
            with pytest.raises(ValueError):
                entropy_deriv(bad)


class TestRaiseProfile:
    def test_saturated(self):
        assert raise_profile(1.0, 0.2) == 1.0

    def test_zero_eps_identity(self):
        assert raise_profile(0.3, 0.0) == pytest.approx(0.3, abs=1e-12)

    def test_midpoint(self):
        assert raise_profile(0.5, 0.1) == pytest.approx(M_05_01, abs=1e-3)
        assert raise_profile(0.5, 0.1) == pytest.approx(M_05_01, abs=1e-12)

    def test_saturation_threshold(self):
        # equals 1 exactly once entropy_inv(s) + eps >= 1/2
        assert raise_profile(0.5, 0.39) == 1.0
        assert raise_profile(0.9, 0.2) == 1.0

    def test_monotone_grid(self):
        s = np.linspace(0.0, 1.0, 101)
        for eps in (0.0, 0.05, 0.2, 0.5):
            m = np.asarray(raise_profile(s, eps))
            assert np.all(m >= s - 1e-12)
            assert np.all(np.diff(m) >= -1e-12)
        m_by_eps = [np.asarray(raise_profile(s, e)) for e in (0.0, 0.1, 0.2, 0.3)]
        for a, b in zip(m_by_eps, m_by_eps[1:]):
            assert np.all(b >= a - 1e-12)

    def test_strictly_above_s_inside(self):
        # equality M(s, eps) = s only at eps = 0 or s = 1
        s = np.linspace(0.0, 0.999, 200)
        for eps in (0.01, 0.1, 0.4):
            assert np.all(np.asarray(raise_profile(s, eps)) > s)

    @given(unit_floats, unit_floats)
    @settings(deadline=None)
    def test_at_least_s(self, s, eps):
        assert raise_profile(s, eps) >= s - 1e-12


class TestBoundCurves:
    def test_paper_values_at_half(self):
        bc = bound_curves(0.5, 1.0)
        assert 0.385 <= bc.raise_ <= 0.395
        assert 0.105 <= bc.lower <= 0.115

    def test_degenerate(self):
        bc = bound_curves(0.3, 0.3)
        assert bc.naive == 0.0
        assert abs(bc.raise_) <= 1e-15

    def test_zero_start(self):
        bc = bound_curves(0.0, 0.5)
        assert bc.naive == pytest.approx(bc.raise_, abs=1e-12)
        assert bc.naive == pytest.approx(HINV_HALF, abs=1e-12)

    def test_ordering(self):
        for s, t in [(0.1, 0.4), (0.2, 0.9), (0.0, 1.0), (0.55, 0.6)]:
            bc = bound_curves(s, t)
            assert bc.naive <= bc.raise_ + 1e-12

    def test_domain(self):
        with pytest.raises(ValueError):
            bound_curves(0.7, 0.3)


class TestCaseSelect:
    def test_near_tie_is_case1(self):
        assert case_select(0.5 - 1e-9, 0.5) == CASE1

    def test_known_cases(self):
        # oracles: evaluate (1-x)/H'(H^{-1}(x)) at both points (brentq route)
        assert case_select(0.1, 0.9) == CASE2
        assert case_select(0.05, 0.2) == CASE1

    def test_domain(self):
        with pytest.raises(ValueError):
            case_select(0.5, 0.5)
        with pytest.raises(ValueError):
            case_select(0.3, 1.0)


class TestLines:
    def test_tangent_delta_zero(self):
        line = tangent_line(0.3, 0.0)
        assert line.slope == pytest.approx(1.0)
        assert line(0.3) == pytest.approx(0.3, abs=1e-12)

    def test_tangent_touches_profile(self):
        line = tangent_line(0.3, 0.05)
        assert line(0.3) == pytest.approx(raise_profile(0.3, 0.05), abs=1e-12)
        assert line.slope == pytest.approx(0.7510601057490901, abs=1e-9)

    def test_tangent_saturated_domain(self):
        with pytest.raises(ValueError):
            tangent_line(0.9, 0.3)

    def test_tangent_below_profile_case1(self):
        # Case-1 conclusion: the tangent stays below the raise profile.
        s, delta = 0.05, entropy_inv(0.2) - entropy_inv(0.05)
        t = raise_profile(s, delta)
        assert case_select(s, t) == CASE1
        line = tangent_line(s, delta)
        xs = np.linspace(0.0, 1.0, 2001)
        r = np.asarray(raise_profile(xs, delta))
        assert np.all(line(xs) <= r + 1e-9)

    def test_tangent_below_profile_case1_sweep(self):
        xs = np.linspace(0.0, 1.0, 1001)
        hits = 0
        for s in (0.01, 0.02, 0.05, 0.1, 0.15, 0.2):
            for delta in (0.01, 0.02, 0.05, 0.1):
                if entropy_inv(s) + delta >= 0.5:
                    continue
                t = raise_profile(s, delta)
                if t >= 1.0 or case_select(s, t) != CASE1:
                    continue
                line = tangent_line(s, delta)
                assert np.all(line(xs) <= np.asarray(raise_profile(xs, delta)) + 1e-9), (s, delta)
                hits += 1
        assert hits >= 5  # the sweep must actually exercise Case 1

    def test_chord_identity(self):
        line = chord_line(0.4, 0.4)
        assert line.slope == pytest.approx(1.0)
        assert line.intercept == pytest.approx(0.0)

    def test_chord_simple(self):
        line = chord_line(0.0, 0.5)
        assert line.slope == 0.5
        assert line.intercept == 0.5

    @given(st.floats(min_value=0.0, max_value=1.0 - 1e-6), unit_floats)
    @settings(deadline=None)
    def test_chord_through_corner(self, s, t):
        line = chord_line(s, t)
        assert line(1.0) == pytest.approx(1.0, abs=1e-9)
        assert line(s) == pytest.approx(t, abs=1e-9)

    def test_chord_domain(self):
        with pytest.raises(ValueError):
            chord_line(1.0, 1.0)


class TestDropProfile:
    def test_corner_zero(self):
        assert drop_profile(1.0, chord_line(0.3, 0.7)) == pytest.approx(0.0, abs=1e-12)

    def test_at_s(self):
        line = chord_line(0.3, 0.7)
        expect = entropy_inv(0.7) - entropy_inv(0.3)
        assert drop_profile(0.3, line) == pytest.approx(expect, abs=1e-12)

    def test_at_zero(self):
        assert drop_profile(0.0, chord_line(0.0, 0.5)) == pytest.approx(HINV_HALF, abs=1e-12)

    def test_concave_and_decreasing_case2(self):
        s, t = 0.5, 0.8
        assert case_select(s, t) == CASE2
        line = chord_line(s, t)
        xs = np.linspace(s, 1.0, 400)
        p = np.asarray(drop_profile(xs, line))
        assert np.all(np.diff(p) <= 1e-9)          # nonincreasing on [s, 1]
        d2 = p[2:] - 2 * p[1:-1] + p[:-2]
        assert np.all(d2 <= 1e-9)                  # concave

    def test_domain(self):
        from dimsurgery.entropy import LineFn

        with pytest.raises(ValueError):
            drop_profile(0.9, LineFn(slope=2.0, intercept=0.5))


class TestConvexityVerification:
    def test_standard_delta(self):
        rep = verify_convexity_lemma(0.1, grid_step=1e-3)
        assert rep.sign_pattern_ok
        assert rep.inflection is not None and 0.0 < rep.inflection < 1.0
        assert rep.worst_violation == 0.0

    def test_w_boundary_signs(self):
        from dimsurgery.entropy import _f_aux

        for delta in (0.05, 0.2, 0.4):
            assert _f_aux(delta) > 0.0                      # w(0+) = f(delta)
            assert -_f_aux(0.5 - delta) < 0.0               # w((1/2-delta)-)

    def test_f_second_derivative_negative_inside(self):
        from dimsurgery.entropy import _f_aux_d2

        ys = np.linspace(1e-3, 0.5 - 1e-3, 999)
        assert np.all(_f_aux_d2(ys) < 0.0)

    def test_curvature_sign_matches_w(self):
        # independent route: sign of the raw second difference of r agrees
        # with the sign of w(g(x)) away from the inflection
        from dimsurgery.entropy import _f_aux

        delta = 0.1
        rep = verify_convexity_lemma(delta, grid_step=1e-3)
        xs = np.linspace(0.02, 0.98, 49)
        h = 1e-4
        r = np.asarray(raise_profile(np.concatenate([xs - h, xs, xs + h]), delta))
        m = len(xs)
        d2 = r[2 * m:] - 2 * r[m:2 * m] + r[:m]
        g = np.asarray(entropy_inv(xs))
        w = np.where(g + delta < 0.5, _f_aux(np.clip(g + delta, 1e-12, 1 - 1e-12)) - _f_aux(np.clip(g, 1e-12, 1 - 1e-12)), -1.0)
        far = np.abs(xs - rep.inflection) > 0.05
        big = np.abs(d2) > 1e-10
        check = far & big
        assert np.all(np.sign(d2[check]) == np.sign(w[check]))

    def test_domain(self):
        with pytest.raises(ValueError):
            verify_convexity_lemma(0.0)
        with pytest.raises(ValueError):
            verify_convexity_lemma(0.5)


class TestConcavityVerification:
    def test_grid(self):
        rep = verify_concavity_lemma(grid_step=5e-3)
        assert rep.sign_pattern_ok
        assert rep.worst_violation == 0.0

    def test_h_center_exact(self):
        from dimsurgery.entropy import _h_aux

        assert abs(float(_h_aux(0.5))) <= 1e-12

    def test_identity_slope_flat(self):
        # a = 1 gives p identically 0
        xs = np.linspace(0.01, 0.99, 99)
        from dimsurgery.entropy import LineFn

        p = np.asarray(drop_profile(xs, LineFn(1.0, 0.0)))
        assert np.max(np.abs(p)) <= 1e-15


class TestUpliftGap:
    def test_zero_eps(self):
        assert uplift_gap(0.0) == 0.0

    def test_positive_and_monotone(self):
        gaps = [uplift_gap(e, grid_step=1e-3) for e in (0.02, 0.05, 0.1, 0.2, 0.4)]
        assert all(g > 0.0 for g in gaps)
        assert all(b >= a - 1e-12 for a, b in zip(gaps, gaps[1:]))

    def test_rejection_oracle(self):
        rng = np.random.default_rng(11)
        for eps in (0.05, 0.15, 0.3):
            d = uplift_gap(eps, grid_step=1e-4)
            xs = rng.uniform(0.0, 1.0, 100_000)
            m = np.asarray(raise_profile(xs, eps))
            assert np.all(m >= d + (1.0 - d) * xs - 1e-12)


class TestBufferSchedule:
    def _check(self, s_list, c, horizon):
        eps, b = buffer_schedule(c, s_list, horizon)
        assert len(eps) == horizon
        assert eps[0] == 1.0
        for prev, cur in zip(eps, eps[1:]):
            assert cur in (prev, prev / 2.0)
        # direct loop: the defining inequality at every index
        js = np.arange(1, horizon + 1)
        w = js.astype(float) ** 2
        n = (js - 1) * js * (2 * js - 1) / 6.0
        s_arr = np.asarray(s_list[:horizon], dtype=float)
        prefix = np.cumsum(np.asarray(raise_profile(s_arr, np.asarray(eps))) * w)
        avg = np.full(horizon, np.inf)
        avg[1:] = np.cumsum(s_arr * w)[:-1] / n[1:]
        s_sur = min(1.0, float(np.min(avg[max(1, horizon // 2) - 1:])))
        assert np.all(prefix - c * w > s_sur * n - b)
        return eps, b

    def test_constant_half(self):
        eps, _ = self._check([0.5] * 600, c=1.0, horizon=600)
        assert eps[-1] < eps[0]

    def test_alternating(self):
        s = [0.2 if i % 2 else 0.8 for i in range(600)]
        self._check(s, c=1.0, horizon=600)

    def test_saturated_input_rejected(self):
        with pytest.raises(ScheduleError):
            buffer_schedule(1.0, [1.0] * 200, 200)

    def test_eps_nonincreasing(self):
        eps, _ = self._check([0.4] * 400, c=5.0, horizon=400)
        assert all(b <= a for a, b in zip(eps, eps[1:]))
