"""Self-similar solutions u(x, t) = (T - t)^alpha v(x (T - t)^beta) of the
fast diffusion equation u_t = (n-1)/m * Laplacian(u^m).

A radial profile v generates such a solution exactly when
alpha = (2 beta + 1)/(1 - m), i.e. rho = 1 in the parameter relation, with
alpha > 0.  The solution lives on t < T and blows down as t -> T.

The diffusion residual is computed analytically by chain rule from
(v, v', v'') at the similarity radius xi = |x| (T - t)^beta, never by finite
differences in (x, t): for a profile this reduces algebraically to the radial
equation residual scaled by (T - t)^(alpha - 1), which keeps the reduction
itself an exact, testable identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import CurveRangeError, DomainError, ParameterError

_TINY = 1e-300
_ANSATZ_REL_TOL = 1e-12


@dataclass(frozen=True)
class SelfSimilarSolution:
    """A profile curve promoted to a space-time solution with blow-down time T."""

    curve: object
    T: float

    def __post_init__(self):
        p = self.curve.params
        if not math.isfinite(self.T):
            raise ParameterError("blow-down time T must be finite")
        if abs(p.rho - 1.0) > _ANSATZ_REL_TOL:
            raise ParameterError(
                f"self-similar form requires alpha = (2 beta + 1)/(1 - m), "
                f"i.e. rho = 1; got rho = {p.rho}"
            )
        if not (p.alpha > 0.0):
            raise ParameterError(f"self-similar family requires alpha > 0, got {p.alpha}")

    def _tau(self, t: float) -> float:
        tau = self.T - t
        if tau <= 0.0:
            raise DomainError(f"time t={t} is at or past the blow-down time T={self.T}")
        return tau

    def similarity_radius(self, x_norm: float, t: float) -> float:
        return x_norm * self._tau(t) ** self.curve.params.beta


def evaluate_u(sol: SelfSimilarSolution, x_norm: float, t: float) -> float:
    """u(x, t) = (T - t)^alpha v(|x| (T - t)^beta)."""
    p = sol.curve.params
    tau = sol._tau(t)
    if x_norm == 0.0:
        return float(tau**p.alpha * p.eta)  # v(0) = eta by the launch condition
    xi = x_norm * tau**p.beta
    if xi < sol.curve.r_first or xi > sol.curve.r_last:
        raise CurveRangeError(
            f"similarity radius {xi:.6g} outside profile range "
            f"[{sol.curve.r_first:.6g}, {sol.curve.r_last:.6g}]"
        )
    v, _, _ = sol.curve.eval_v(xi)
    return float(tau**p.alpha * v)


def _pde_sides(sol: SelfSimilarSolution, x_norm: float, t: float):
    """(u_t, diffusion term) computed analytically at (x, t)."""
    p = sol.curve.params
    n, m = p.n, p.m
    tau = sol._tau(t)
    xi = x_norm * tau**p.beta
    if xi < sol.curve.r_first or xi > sol.curve.r_last:
        raise CurveRangeError(f"similarity radius {xi:.6g} outside profile range")
    # Equation-independent second derivative: keeps the residual a real check.
    V, P, dP = sol.curve.eval_vm_with_slope(xi)
    inv_m = 1.0 / m
    v = V**inv_m
    vp = inv_m * V ** (inv_m - 1.0) * P
    u_t = -(tau ** (p.alpha - 1.0)) * (p.alpha * v + p.beta * xi * vp)
    # (n-1)/m * Laplacian(u^m) = tau^(alpha m + 2 beta) * (n-1)/m * ((v^m)'' + (n-1)/xi (v^m)')
    diffusion = tau ** (p.alpha * m + 2.0 * p.beta) * (n - 1.0) / m * (dP + (n - 1.0) / xi * P)
    return u_t, diffusion


def pde_residual(sol: SelfSimilarSolution, x_norm: float, t: float) -> float:
    """Relative residual of u_t = (n-1)/m Laplacian(u^m) at (x, t)."""
    u_t, diffusion = _pde_sides(sol, x_norm, t)
    return float((u_t - diffusion) / max(abs(u_t), abs(diffusion), _TINY))
