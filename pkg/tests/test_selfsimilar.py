import math
import random

import pytest

from conftest import EXPLICIT, THEOREM4, make_params
from ydecay import model, selfsimilar, solver
from ydecay.exceptions import CurveRangeError, DomainError, ParameterError
from ydecay.profiles import explicit_profile


@pytest.fixture(scope="module")
def explicit_sol():
    prof = explicit_profile(make_params(EXPLICIT), r_lo=1e-6, r_hi=1e6)
    return selfsimilar.SelfSimilarSolution(prof, T=1.0)


@pytest.fixture(scope="module")
def numeric_sol():
    curve = solver.integrate(make_params(EXPLICIT), r_max=1e4, tol=1e-10)
    return selfsimilar.SelfSimilarSolution(curve, T=1.0)


class TestConstruction:
    def test_requires_rho_one(self, get_curve):
        with pytest.raises(ParameterError, match="rho = 1"):
            selfsimilar.SelfSimilarSolution(get_curve(THEOREM4, rho=2.0, allow=True), T=1.0)

    def test_requires_positive_alpha(self):
        # beta = -0.5 with rho = 1 gives alpha = 0: not in the family.
        p = make_params(EXPLICIT, beta=-0.5)
        prof = explicit_profile(make_params(EXPLICIT))
        prof.params = p
        with pytest.raises(ParameterError, match="alpha > 0"):
            selfsimilar.SelfSimilarSolution(prof, T=1.0)


class TestEvaluate:
    def test_unit_time_factor(self, explicit_sol):
        # T - t = 1 makes u equal the profile itself.
        v, _, _ = explicit_sol.curve.eval_v(1.7)
        assert selfsimilar.evaluate_u(explicit_sol, 1.7, 0.0) == pytest.approx(float(v), rel=1e-14)

    def test_center_value(self, explicit_sol):
        p = explicit_sol.curve.params
        tau = 0.25
        assert selfsimilar.evaluate_u(explicit_sol, 0.0, 1.0 - tau) == pytest.approx(
            tau**p.alpha * p.eta, rel=1e-14
        )

    def test_explicit_composition(self, explicit_sol):
        p = explicit_sol.curve.params
        lam2 = model.explicit_lambda(p) ** 2
        K = 2.0 * (p.n - 1) * (p.n - 2 - p.n * p.m) / (1 - p.m)
        tau, x = 0.5, 1.0
        xi = x * tau**p.beta
        hand = tau**p.alpha * (K / (lam2 + xi * xi)) ** (1.0 / (1.0 - p.m))
        assert selfsimilar.evaluate_u(explicit_sol, x, 1.0 - tau) == pytest.approx(hand, rel=1e-10)

    def test_time_domain(self, explicit_sol):
        with pytest.raises(DomainError):
            selfsimilar.evaluate_u(explicit_sol, 1.0, 1.0)
        with pytest.raises(DomainError):
            selfsimilar.evaluate_u(explicit_sol, 1.0, 2.0)

    def test_out_of_profile_range(self, numeric_sol):
        with pytest.raises(CurveRangeError):
            selfsimilar.evaluate_u(numeric_sol, 1e9, 0.0)

    def test_decreasing_in_time_at_center(self, explicit_sol):
        us = [selfsimilar.evaluate_u(explicit_sol, 0.0, t) for t in (-1.0, 0.0, 0.5, 0.9)]
        assert all(b < a for a, b in zip(us, us[1:]))


class TestResidual:
    def test_exact_profile(self, explicit_sol):
        assert abs(selfsimilar.pde_residual(explicit_sol, 1.0, 0.5)) <= 1e-8

    def test_numeric_profile_random_points(self, numeric_sol):
        rng = random.Random(0)
        for _ in range(10):
            x = 10.0 ** rng.uniform(-1.0, 2.0)
            t = rng.uniform(-3.0, 0.9)
            assert abs(selfsimilar.pde_residual(numeric_sol, x, t)) <= 1e-6

    def test_reduces_to_radial_residual(self, numeric_sol):
        # u_t - diffusion = -(T-t)^(alpha-1) * (radial equation LHS at xi):
        # proportionality with the known positive factor, not equality.
        p = numeric_sol.curve.params
        for (x, t) in ((1.7, 0.3), (0.2, -1.0), (20.0, 0.9)):
            u_t, diff = selfsimilar._pde_sides(numeric_sol, x, t)
            tau = 1.0 - t
            xi = x * tau**p.beta
            V, P, dP = numeric_sol.curve.eval_vm_with_slope(xi)
            inv_m = 1.0 / p.m
            v = V**inv_m
            vp = inv_m * V ** (inv_m - 1.0) * P
            lhs_radial = (
                (p.n - 1) / p.m * (dP + (p.n - 1) / xi * P) + p.alpha * v + p.beta * xi * vp
            )
            assert u_t - diff == pytest.approx(-(tau ** (p.alpha - 1.0)) * lhs_radial, rel=1e-8)

    def test_scaling_factor_positive(self, numeric_sol):
        # Same (x, t) -> xi map with different tau: residual ratio follows
        # the (T-t)^(alpha-1) scaling of the absolute defect.
        p = numeric_sol.curve.params
        xi = 2.0
        sides = []
        for tau in (0.5, 0.25):
            x = xi / tau**p.beta
            u_t, diff = selfsimilar._pde_sides(numeric_sol, x, 1.0 - tau)
            sides.append(u_t - diff)
        expected = (0.25 / 0.5) ** (p.alpha - 1.0)
        assert sides[1] / sides[0] == pytest.approx(expected, rel=1e-8)
