import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EXPLICIT, THEOREM4, YAMABE3, make_params
from ydecay import asymptotics, model
from ydecay.exceptions import CurveTooShortError, LadderError
from ydecay.profiles import explicit_profile, singular_profile


class TestAitken:
    def test_exact_on_geometric_sequences(self):
        r = asymptotics.ladder_radii(1e6, 2.0, 12)
        seq = 5.0 + 3.0 * r**-0.7
        limit, residual, _ = asymptotics.aitken_limit(seq)
        assert limit == pytest.approx(5.0, abs=1e-12)
        assert residual < 1e-10

    @settings(max_examples=100, deadline=None)
    @given(
        st.floats(min_value=0.5, max_value=50.0),
        st.floats(min_value=-10.0, max_value=10.0).filter(lambda c: abs(c) > 1e-3),
        st.floats(min_value=0.2, max_value=3.0),
        st.floats(min_value=1.3, max_value=4.0),
    )
    def test_exact_on_geometric_sequences_property(self, w_inf, c, q, ratio):
        r = asymptotics.ladder_radii(1e5, ratio, 10)
        limit, _, _ = asymptotics.aitken_limit(w_inf + c * r**-q)
        assert limit == pytest.approx(w_inf, rel=1e-9, abs=1e-9)

    def test_constant_sequence(self):
        limit, residual, _ = asymptotics.aitken_limit([4.0] * 8)
        assert limit == 4.0
        assert residual == 0.0

    def test_two_scale_sequence_beats_raw(self):
        # Two superposed powers: iterated passes must improve on the raw tail.
        r = asymptotics.ladder_radii(1e6, 2.0, 14)
        seq = 1.0 + 2.0 * r**-0.5 - 5.0 * r**-1.25
        limit, _, levels = asymptotics.aitken_limit(seq)
        assert len(levels) >= 3
        assert abs(limit - 1.0) < 1e-4 * abs(seq[-1] - 1.0)

    def test_too_short(self):
        with pytest.raises(LadderError):
            asymptotics.aitken_limit([1.0, 2.0])


class TestDecayEstimate:
    def test_explicit_instance(self, get_curve):
        est = asymptotics.decay_estimate(get_curve(EXPLICIT))
        assert est.w_limit == pytest.approx(2.0, abs=1e-4)
        assert est.converged

    def test_theorem4_instance(self, get_curve):
        est = asymptotics.decay_estimate(get_curve(THEOREM4))
        assert est.w_limit == pytest.approx(8.0, rel=0.01)

    def test_yamabe3_logslope(self, get_curve):
        est = asymptotics.decay_estimate(get_curve(YAMABE3))
        assert est.logslope_limit == pytest.approx(-2.5, rel=0.01)

    def test_samples_match_curve(self, get_curve):
        curve = get_curve(THEOREM4)
        est = asymptotics.decay_estimate(curve)
        for r, w in est.w_samples:
            assert w == pytest.approx(curve.w(r), rel=1e-14)
        for r, ls in est.logslope_samples:
            assert ls == pytest.approx(curve.logslope(r), rel=1e-14)
        assert np.all(np.asarray([w for _, w in est.w_samples]) > 0.0)

    def test_ladder_exceeds_curve(self, get_curve):
        curve = get_curve(EXPLICIT, r_max=1e3)
        with pytest.raises(LadderError):
            asymptotics.decay_estimate(curve, ladder_ratio=4.0, count=12)
        with pytest.raises(LadderError):
            asymptotics.decay_estimate(curve, r_top=1e5)

    def test_scale_invariance_of_limit(self, get_curve):
        base = asymptotics.decay_estimate(get_curve(THEOREM4))
        lam = 2.0
        scaled_eta = model.rescale(make_params(THEOREM4), lam).eta
        scaled = asymptotics.decay_estimate(get_curve(THEOREM4, eta=scaled_eta))
        assert scaled.w_limit == pytest.approx(base.w_limit, rel=1e-6)

    def test_logslope_consistency_identity(self, get_curve):
        # w' = (2w/r)(1 + (1-m)/2 * r v'/v) is exact algebra; checked from
        # the evaluated derivatives directly.
        curve = get_curve(THEOREM4)
        m = curve.params.m
        for r in (3.0, 97.0, 1.2e4):
            v, vp, _ = curve.eval_v(r)
            w = curve.w(r)
            w_prime = 2.0 * r * v ** (1 - m) + (1 - m) * r * r * v**-m * vp
            rhs = (2.0 * w / r) * (1.0 + 0.5 * (1 - m) * curve.logslope(r))
            assert w_prime == pytest.approx(rhs, rel=1e-12)


class TestSubsequenceCheck:
    def test_theorem4_band(self, get_curve):
        rep = asymptotics.subsequence_value_check(get_curve(THEOREM4), burn_in=1e3)
        assert rep.within_band  # all w(r >= 1e3) within 5% of 8
        assert rep.max_deviation < 0.05
        assert rep.w1_excluded is True

    def test_explicit_band(self, get_curve):
        rep = asymptotics.subsequence_value_check(get_curve(EXPLICIT))
        assert rep.within_band  # within 5% of 2 for r >= 100
        assert rep.w1_excluded is None  # alpha = n beta: w_one coincides

    def test_w1_exclusion_upper_regime(self, get_curve):
        # w_one = 5 vs w_infinity = 2: the tail must cluster at 2, not 5.
        rep = asymptotics.subsequence_value_check(get_curve(YAMABE3), burn_in=1e4, band=0.05)
        assert rep.w1_excluded is True
        assert rep.within_band

    def test_burn_in_beyond_curve(self, get_curve):
        with pytest.raises(LadderError):
            asymptotics.subsequence_value_check(get_curve(EXPLICIT, r_max=1e3), burn_in=1e5)


class TestRescalingConvergence:
    def test_monotone_on_theorem4(self, get_curve):
        rep = asymptotics.rescaling_convergence(get_curve(THEOREM4), [10.0, 100.0, 1000.0], R=1.0)
        assert rep.monotone_decreasing
        assert rep.sup_errors[0] < 1.0

    def test_singular_profile_is_fixed_point(self):
        prof = singular_profile(make_params(YAMABE3), r_lo=1e-3, r_hi=1e5)
        rep = asymptotics.rescaling_convergence(prof, [1.0], R=1.0)
        assert rep.sup_errors[0] < 1e-13

    def test_explicit_closed_form_tail(self):
        # For the explicit solution the sup distance over [R, 10R] is exactly
        # 1 - (R^2/(R^2 + lam_e^2/lam^2))^(1/(1-m)), attained at r = R.
        p = make_params(EXPLICIT)
        prof = explicit_profile(p, r_lo=1e-4, r_hi=1e6)
        lam_e2 = model.explicit_lambda(p) ** 2
        R = 1.0
        rep = asymptotics.rescaling_convergence(prof, [10.0, 100.0], R=R)
        for lam, sup in zip(rep.lambdas, rep.sup_errors):
            exact = 1.0 - (R**2 / (R**2 + lam_e2 / lam**2)) ** (1.0 / (1.0 - p.m))
            assert sup == pytest.approx(exact, rel=1e-3)

    def test_curve_too_short(self, get_curve):
        with pytest.raises(CurveTooShortError):
            asymptotics.rescaling_convergence(get_curve(EXPLICIT, r_max=1e3), [1000.0], R=1.0)

    def test_bad_window(self, get_curve):
        with pytest.raises(LadderError):
            asymptotics.rescaling_convergence(get_curve(EXPLICIT, r_max=1e3), [10.0], R=-1.0)
