import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EXPLICIT, OFF_REGIME, THEOREM4, YAMABE3, make_params
from ydecay import model, solver
from ydecay.exceptions import DomainError, ParameterError
from ydecay.profiles import explicit_profile, singular_profile


def theorem_params():
    """Strategy over parameter tuples satisfying all decay-regime hypotheses."""

    @st.composite
    def build(draw):
        n = draw(st.integers(min_value=3, max_value=8))
        m = draw(st.floats(min_value=0.02, max_value=(n - 2) / n - 1e-3))
        rho = draw(st.floats(min_value=0.05, max_value=5.0))
        bound = m * rho / (n - 2 - m * n)
        beta = bound + draw(st.floats(min_value=1e-3, max_value=5.0))
        eta = draw(st.floats(min_value=0.1, max_value=10.0))
        return model.ProblemParams(n=n, m=m, beta=beta, rho=rho, eta=eta)

    return build()


class TestDeriveAlpha:
    def test_hand_substitution_n3(self):
        assert model.derive_alpha(3, 0.2, 2.5, 1.0) == pytest.approx(7.5, rel=1e-15)

    def test_zero_case(self):
        assert model.derive_alpha(5, 0.37, 0.0, 0.0) == 0.0

    def test_hand_substitution_n4(self):
        assert model.derive_alpha(4, 0.25, 2.0, 1.0) == pytest.approx(20.0 / 3.0, rel=1e-15)

    def test_rejects_m_at_least_one(self):
        with pytest.raises(ParameterError):
            model.derive_alpha(3, 1.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            model.derive_alpha(3, 1.5, 1.0, 1.0)


class TestProblemParams:
    def test_alpha_derived_not_stored(self):
        p = make_params(YAMABE3)
        assert p.alpha == pytest.approx((2 * p.beta + p.rho) / (1 - p.m), rel=1e-15)

    @pytest.mark.parametrize(
        "bad",
        [
            dict(n=2, m=0.1, beta=1.0, rho=1.0, eta=1.0),
            dict(n=3, m=0.0, beta=1.0, rho=1.0, eta=1.0),
            dict(n=3, m=1.0, beta=1.0, rho=1.0, eta=1.0),
            dict(n=3, m=0.2, beta=1.0, rho=1.0, eta=0.0),
            dict(n=3, m=0.2, beta=1.0, rho=1.0, eta=-1.0),
            dict(n=3, m=0.2, beta=math.nan, rho=1.0, eta=1.0),
        ],
    )
    def test_hard_constraints(self, bad):
        with pytest.raises(ParameterError):
            model.ProblemParams(**bad)

    def test_non_integer_dimension_rejected(self):
        with pytest.raises(ParameterError):
            model.ProblemParams(n=3.0, m=0.2, beta=1.0, rho=1.0, eta=1.0)


class TestClassify:
    def test_yamabe_decay_instance(self):
        tag = model.classify(make_params(YAMABE3))
        assert tag.theorem_applies
        assert tag.yamabe_case
        assert tag.alpha_vs_nbeta == "greater"  # alpha = 3.75 > n beta = 3
        assert not tag.explicit_case
        assert tag.reason is None

    def test_explicit_instance(self):
        tag = model.classify(make_params(EXPLICIT))
        assert tag.explicit_case
        assert tag.alpha_vs_nbeta == "equal"
        assert tag.theorem_applies  # beta = 2.5 > rho/2

    def test_m_range_violation_is_data(self):
        tag = model.classify(make_params(YAMABE3, m=0.5))
        assert not tag.theorem_applies
        assert "m=" in tag.reason and "0.33" in tag.reason

    def test_beta_bound_violation(self):
        tag = model.classify(make_params(OFF_REGIME))
        assert not tag.theorem_applies
        assert "beta" in tag.reason

    def test_rho_violation_and_advisory(self):
        tag = model.classify(make_params(YAMABE3, beta=-0.3, rho=-1.0))
        assert not tag.theorem_applies
        assert tag.existence_advisory is not None

    def test_never_raises(self):
        # Wildly off-regime values still classify.
        tag = model.classify(make_params(YAMABE3, beta=-50.0, rho=0.0))
        assert not tag.theorem_applies

    def test_yamabe_exponent_relation(self):
        # m = (n-2)/(n+2) implies 1 - m = 4/(n+2).
        for n in range(3, 11):
            p = model.ProblemParams(n=n, m=(n - 2) / (n + 2), beta=1.0, rho=1.0, eta=1.0)
            tag = model.classify(p)
            assert tag.yamabe_case
            assert 1 - p.m == pytest.approx(4 / (n + 2), rel=1e-14)

    def test_explicit_case_forces_rho_one(self):
        # alpha = n beta and alpha = (2 beta + 1)/(1-m) together force rho = 1.
        tag = model.classify(make_params(EXPLICIT, rho=1.2))
        assert not tag.explicit_case

    def test_rel_tol_override(self):
        p = make_params(EXPLICIT, beta=2.5 * (1 + 1e-9))
        assert model.classify(p).alpha_vs_nbeta != "equal"
        assert model.classify(p, rel_tol=1e-6).alpha_vs_nbeta == "equal"


class TestWInfinity:
    @pytest.mark.parametrize(
        "spec,expected",
        [(YAMABE3, 2.0), (THEOREM4, 8.0), (EXPLICIT, 2.0)],
    )
    def test_closed_form_values(self, spec, expected):
        assert model.w_infinity(make_params(spec)) == pytest.approx(expected, rel=1e-13)

    def test_rejects_nonpositive_denominator(self):
        with pytest.raises(ParameterError):
            model.w_infinity(make_params(YAMABE3, rho=0.0))
        with pytest.raises(ParameterError):
            model.w_infinity(make_params(YAMABE3, rho=-2.0))

    def test_yamabe_reduction(self):
        # At the conformal exponent the limit reduces to (n-1)(n-2)/rho.
        for n in range(3, 11):
            for rho in (0.25, 0.5, 1.0, 2.0, 3.7):
                p = model.ProblemParams(n=n, m=(n - 2) / (n + 2), beta=1.0, rho=rho, eta=1.0)
                assert model.w_infinity(p) == pytest.approx((n - 1) * (n - 2) / rho, rel=1e-12)

    def test_beta_threshold_reduces_to_half_rho(self):
        for n in range(3, 11):
            for rho in (0.25, 1.0, 3.7):
                p = model.ProblemParams(n=n, m=(n - 2) / (n + 2), beta=1.0, rho=rho, eta=1.0)
                assert p.beta_lower_bound == pytest.approx(rho / 2, rel=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(theorem_params())
    def test_positive_and_finite_in_regime(self, p):
        w = model.w_infinity(p)
        assert w > 0.0 and math.isfinite(w)


class TestWOne:
    @pytest.mark.parametrize(
        "spec,expected",
        [(THEOREM4, 4.0), (EXPLICIT, 2.0), (YAMABE3, 5.0)],
    )
    def test_closed_form_values(self, spec, expected):
        assert model.w_one(make_params(spec)) == pytest.approx(expected, rel=1e-13)

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ParameterError):
            model.w_one(make_params(YAMABE3, beta=0.0, rho=3.0))

    @settings(max_examples=80, deadline=None)
    @given(theorem_params())
    def test_ordering_matches_alpha_vs_nbeta(self, p):
        # sign(w_one - w_infinity) == sign(alpha - n beta) whenever beta > 0
        diff_w = model.w_one(p) - model.w_infinity(p)
        diff_a = p.alpha - p.n * p.beta
        if abs(diff_a) > 1e-9 * abs(p.alpha):
            assert math.copysign(1, diff_w) == math.copysign(1, diff_a)

    def test_equality_at_explicit_case(self):
        p = make_params(EXPLICIT)
        assert model.w_one(p) == pytest.approx(model.w_infinity(p), rel=1e-13)


class TestClosedFormConstants:
    def test_bundle(self):
        cfc = model.closed_form_constants(make_params(YAMABE3))
        assert cfc.w_inf == pytest.approx(2.0, rel=1e-13)
        assert cfc.w_1 == pytest.approx(5.0, rel=1e-13)

    def test_w1_absent_for_nonpositive_beta(self):
        cfc = model.closed_form_constants(make_params(YAMABE3, beta=-0.1, rho=3.0))
        assert cfc.w_1 is None


class TestSingularSolution:
    def test_value_at_unit_radius(self):
        v = model.singular_solution_v0(make_params(YAMABE3), 1.0)
        assert v == pytest.approx(2.0**1.25, rel=1e-13)

    def test_monotone_power_decay(self):
        p = make_params(YAMABE3)
        vals = [model.singular_solution_v0(p, x) for x in (1.0, 3.0, 10.0, 1e3, 1e6)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(DomainError):
            model.singular_solution_v0(make_params(YAMABE3), 0.0)

    def test_equation_residual_is_roundoff(self):
        prof = singular_profile(make_params(YAMABE3))
        assert abs(solver.ode_residual(prof, 3.7)) < 1e-10


class TestExplicitSolution:
    def test_origin_height_one_at_lambda_sqrt2(self):
        p = make_params(EXPLICIT)
        assert model.explicit_solution(p, math.sqrt(2.0), 0.0) == pytest.approx(1.0, rel=1e-13)
        assert model.explicit_lambda(p) == pytest.approx(math.sqrt(2.0), rel=1e-13)

    def test_tail_matches_w_infinity(self):
        p = make_params(EXPLICIT)
        r = 1e7
        w_tail = r * r * model.explicit_solution(p, math.sqrt(2.0), r) ** (1 - p.m)
        assert w_tail == pytest.approx(2.0, rel=1e-10)

    def test_equation_residual_is_roundoff(self):
        prof = explicit_profile(make_params(EXPLICIT), math.sqrt(2.0))
        assert abs(solver.ode_residual(prof, 1.3)) < 1e-10

    def test_rejected_outside_explicit_case(self):
        with pytest.raises(ParameterError):
            model.explicit_solution(make_params(YAMABE3), 1.0, 1.0)
        with pytest.raises(ParameterError):
            model.explicit_solution(make_params(EXPLICIT), -1.0, 1.0)


class TestRescale:
    def test_identity(self):
        p = make_params(THEOREM4)
        assert model.rescale(p, 1.0) == p

    def test_eta_exponent(self):
        p = make_params(YAMABE3)
        assert model.rescale(p, 2.0).eta == pytest.approx(2.0**2.5, rel=1e-14)

    def test_group_law_two_twos_is_four(self):
        p = make_params(THEOREM4)
        once = model.rescale(p, 4.0)
        twice = model.rescale(model.rescale(p, 2.0), 2.0)
        assert once.eta == pytest.approx(twice.eta, rel=1e-14)
        assert (once.n, once.m, once.beta, once.rho) == (twice.n, twice.m, twice.beta, twice.rho)

    @settings(max_examples=60, deadline=None)
    @given(
        theorem_params(),
        st.floats(min_value=0.1, max_value=10.0),
        st.floats(min_value=0.1, max_value=10.0),
    )
    def test_group_action(self, p, a, b):
        lhs = model.rescale(model.rescale(p, a), b)
        rhs = model.rescale(p, a * b)
        assert lhs.eta == pytest.approx(rhs.eta, rel=1e-12)

    def test_rejects_nonpositive_factor(self):
        with pytest.raises(ParameterError):
            model.rescale(make_params(YAMABE3), 0.0)
