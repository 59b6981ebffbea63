"""Closed-form radial profiles exposing the same evaluation surface as SolutionCurve.

Used wherever an exact curve is needed: solver acceptance oracles, residual
checks on the known solutions, synthetic curvature tests.  Everything is
immutable and thread-safe.
"""

from __future__ import annotations

import numpy as np

from . import model
from .exceptions import CurveRangeError, DomainError


class AnalyticProfile:
    """A radial profile v(r) given by closed-form callables.

    The three callables must accept numpy arrays and return v, v', v''.
    The synthetic `grid` exists so that grid-based checks (bound reports,
    quadrature) can run on analytic curves too.
    """

    status = "ok"
    tol = 1e-14

    def __init__(self, params, v_fn, vp_fn, vpp_fn, r_lo=1e-4, r_hi=1e6, n_grid=4096):
        if not (0.0 < r_lo < r_hi):
            raise DomainError("need 0 < r_lo < r_hi")
        self.params = params
        self._v = v_fn
        self._vp = vp_fn
        self._vpp = vpp_fn
        self.grid = np.geomspace(r_lo, r_hi, n_grid)

    @property
    def r_first(self) -> float:
        return float(self.grid[0])

    @property
    def r_last(self) -> float:
        return float(self.grid[-1])

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0):
            raise CurveRangeError("radius must be positive")
        return r

    def eval_v(self, r):
        r = self._check(r)
        return self._v(r), self._vp(r), self._vpp(r)

    # Analytic second derivatives are exact; the "measured" variant used by
    # residual checks coincides with them here.
    eval_v_measured = eval_v

    def eval_vm(self, r):
        r = self._check(r)
        m = self.params.m
        v = self._v(r)
        return v**m, m * v ** (m - 1.0) * self._vp(r)

    def eval_vm_with_slope(self, r):
        r = self._check(r)
        m = self.params.m
        v, vp, vpp = self._v(r), self._vp(r), self._vpp(r)
        V = v**m
        P = m * v ** (m - 1.0) * vp
        dP = m * (m - 1.0) * v ** (m - 2.0) * vp * vp + m * v ** (m - 1.0) * vpp
        return V, P, dP

    def w(self, r):
        r = self._check(r)
        return r * r * self._v(r) ** (1.0 - self.params.m)

    def logslope(self, r):
        r = self._check(r)
        return r * self._vp(r) / self._v(r)


def explicit_profile(params, lam=None, r_lo=1e-4, r_hi=1e6, n_grid=4096) -> AnalyticProfile:
    """Exact profile of the alpha = n*beta, rho = 1 family.

    With lam omitted, the member matching params.eta at the origin is chosen.
    """
    if lam is None:
        lam = model.explicit_lambda(params)
    else:
        model.explicit_solution(params, lam, 0.0)  # validates the regime and lam
    n, m = params.n, params.m
    K = 2.0 * (n - 1.0) * (n - 2.0 - n * m) / (1.0 - m)
    lam2 = lam * lam
    e = 1.0 / (1.0 - m)

    def v(r):
        return (K / (lam2 + r * r)) ** e

    def vp(r):
        return v(r) * (-2.0 * e * r / (lam2 + r * r))

    def vpp(r):
        d = lam2 + r * r
        L = -2.0 * e * r / d
        Lp = 2.0 * e * (r * r - lam2) / (d * d)
        return v(r) * (L * L + Lp)

    return AnalyticProfile(params, v, vp, vpp, r_lo, r_hi, n_grid)


def singular_profile(params, r_lo=1e-4, r_hi=1e6, n_grid=4096) -> AnalyticProfile:
    """Exact power-law profile (w_infinity/r^2)^(1/(1-m)), singular at the origin."""
    w_inf = model.w_infinity(params)
    e = 1.0 / (1.0 - params.m)

    def v(r):
        return (w_inf / (r * r)) ** e

    def vp(r):
        return v(r) * (-2.0 * e / r)

    def vpp(r):
        return v(r) * (4.0 * e * e + 2.0 * e) / (r * r)

    return AnalyticProfile(params, v, vp, vpp, r_lo, r_hi, n_grid)
