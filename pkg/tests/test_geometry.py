import numpy as np
import pytest

from conftest import EXPLICIT, THEOREM4, YAMABE3, YAMABE5, make_params
from ydecay import geometry, model
from ydecay.exceptions import NotYamabeError
from ydecay.profiles import explicit_profile, singular_profile


def sphere_derivatives(m, r, radius=1.0):
    """Closed-form (v, v', v'') whose conformal factor v^(1-m) is the round
    sphere of the given radius in stereographic coordinates."""
    e = 2.0 / (1.0 - m)
    a2 = radius * radius
    d = a2 + r * r
    v = (2.0 * a2 / d) ** e
    L = -2.0 * e * r / d
    Lp = 2.0 * e * (r * r - a2) / (d * d)
    return v, v * L, v * (L * L + Lp)


class TestPointFormulas:
    def test_flat_space(self):
        r = np.array([0.1, 1.0, 7.0])
        K0, K1 = geometry.curvatures_from_derivatives(0.2, r, np.ones(3), np.zeros(3), np.zeros(3))
        assert np.allclose(K0, 0.0, atol=1e-15)
        assert np.allclose(K1, 0.0, atol=1e-15)

    @pytest.mark.parametrize("m", [0.2, 3.0 / 7.0])
    def test_unit_round_sphere(self, m):
        r = np.array([0.31, 0.7, 1.9])
        v, vp, vpp = sphere_derivatives(m, r)
        K0, K1 = geometry.curvatures_from_derivatives(m, r, v, vp, vpp)
        assert np.allclose(K0, 1.0, rtol=1e-11)
        assert np.allclose(K1, 1.0, rtol=1e-11)

    def test_sphere_radius_scaling(self):
        # Sphere of radius a has sectional curvature 1/a^2.
        r = np.array([0.5, 2.0])
        v, vp, vpp = sphere_derivatives(0.2, r, radius=3.0)
        K0, K1 = geometry.curvatures_from_derivatives(0.2, r, v, vp, vpp)
        assert np.allclose(K0, 1.0 / 9.0, rtol=1e-11)
        assert np.allclose(K1, 1.0 / 9.0, rtol=1e-11)

    def test_warped_scalar_on_sphere(self):
        for n in (3, 5):
            m = (n - 2) / (n + 2)
            r = np.array([0.9])
            v, vp, vpp = sphere_derivatives(m, r)
            R = geometry.warped_scalar_from_derivatives(n, m, r, v, vp, vpp)
            assert R[0] == pytest.approx(n * (n - 1.0), rel=1e-11)

    def test_convention_validation_runs(self):
        geometry.validate_sign_conventions()


class TestScalarCurvature:
    def test_value_at_origin_limit(self, get_curve):
        curve = get_curve(YAMABE3)
        p = curve.params
        # r v'/v -> 0 at the origin, so R -> (1-m) alpha.
        assert geometry.scalar_curvature(curve, 1e-4) == pytest.approx(
            (1 - p.m) * p.alpha, rel=1e-6
        )

    def test_limit_is_rho(self, get_curve):
        assert geometry.scalar_curvature(get_curve(YAMABE3), 1e5) == pytest.approx(1.0, rel=0.01)

    def test_explicit_closed_form(self):
        # r v'/v = -(2/(1-m)) r^2/(lam^2+r^2) gives
        # R = (1-m) alpha - 2 beta r^2/(lam^2+r^2).
        p = make_params(EXPLICIT)
        prof = explicit_profile(p)
        lam2 = model.explicit_lambda(p) ** 2
        r = 1.0
        expected = (1 - p.m) * p.alpha - 2.0 * p.beta * r * r / (lam2 + r * r)
        assert float(geometry.scalar_curvature(prof, r)) == pytest.approx(expected, rel=1e-12)

    def test_not_yamabe_rejected(self, get_curve):
        with pytest.raises(NotYamabeError):
            geometry.scalar_curvature(get_curve(THEOREM4), 1.0)
        with pytest.raises(NotYamabeError):
            geometry.sectional_curvatures(get_curve(THEOREM4), 1.0)


class TestSectionalCurvatures:
    def test_yamabe3_limits_at_1e5(self, get_curve):
        K0, K1 = geometry.sectional_curvatures(get_curve(YAMABE3), 1e5)
        assert abs(float(K0)) <= 1e-3
        assert float(K1) == pytest.approx(0.5, rel=0.01)  # rho/((n-1)(n-2)) = 1/2

    def test_yamabe5_limits_at_1e5(self, get_curve):
        K0, K1 = geometry.sectional_curvatures(get_curve(YAMABE5), 1e5)
        assert abs(float(K0)) <= 1e-3
        assert float(K1) == pytest.approx(1.0 / 12.0, rel=0.01)

    def test_positive_sectional_curvature(self, get_curve):
        # Shrinking-soliton profiles carry positive sectional curvature.
        for spec in (YAMABE3, YAMABE5):
            curve = get_curve(spec)
            r = np.geomspace(curve.r_first, curve.r_last * 0.999, 200)
            K0, K1 = geometry.sectional_curvatures(curve, r)
            assert np.all(K0 > 0.0)
            assert np.all(K1 > 0.0)

    def test_singular_profile_exact_everywhere(self):
        # v0 makes the sphere radius exactly constant: K0 = 0 and
        # K1 = 1/w_infinity identically in r.
        p = make_params(YAMABE3)
        prof = singular_profile(p)
        w_inf = model.w_infinity(p)
        r = np.geomspace(1e-2, 1e5, 50)
        K0, K1 = geometry.sectional_curvatures(prof, r)
        assert np.max(np.abs(K0)) < 1e-13 / w_inf
        assert np.allclose(K1, 1.0 / w_inf, rtol=1e-12)

    def test_k1_times_w_tends_to_one(self, get_curve):
        curve = get_curve(YAMABE3)
        vals = []
        for r in (1e3, 1e4, 1e5):
            _, K1 = geometry.sectional_curvatures(curve, r)
            vals.append(abs(float(K1) * curve.w(r) - 1.0))
        assert vals[-1] < 1e-5
        assert vals[2] < vals[0]


class TestScalarConsistency:
    @pytest.mark.parametrize("spec", [YAMABE3, YAMABE5])
    def test_profile_vs_warped_product(self, get_curve, spec):
        # Two independent exact expressions for the same scalar curvature:
        # the profile-equation form and the warped-product form with the
        # measured (equation-independent) second derivative.
        curve = get_curve(spec)
        r = np.geomspace(1.0, 1e4, 40)
        R_profile = geometry.scalar_curvature(curve, r)
        R_warped = geometry.warped_scalar_curvature(curve, r, measured=True)
        assert np.max(np.abs(R_warped - R_profile) / np.abs(R_profile)) < 1e-6


class TestCurvatureLimits:
    def test_yamabe3_report(self, get_curve):
        rep = geometry.curvature_limits(get_curve(YAMABE3))
        assert rep.R_limit == pytest.approx(1.0, rel=0.01)
        assert rep.K0_abs_deviation <= 1e-3
        assert rep.K1_limit == pytest.approx(0.5, rel=0.01)

    def test_yamabe5_report_and_monotone_tail(self, get_curve):
        rep = geometry.curvature_limits(get_curve(YAMABE5))
        assert rep.R_limit == pytest.approx(1.0, rel=0.01)
        assert rep.K0_abs_deviation <= 1e-6
        assert rep.K1_limit == pytest.approx(1.0 / 12.0, rel=0.01)
        # Limit deviations shrink monotonically along the top rungs here;
        # in n=3 the tail oscillates around its target, so this is asserted
        # only where the approach is one-sided.
        assert all(rep.deviations_monotone_last3)

    def test_singular_profile_limits_exact(self):
        p = make_params(YAMABE3)
        rep = geometry.curvature_limits(singular_profile(p), count=8)
        assert rep.R_rel_deviation < 1e-11
        assert rep.K0_abs_deviation < 1e-14
        assert rep.K1_rel_deviation < 1e-11
