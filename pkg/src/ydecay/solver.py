"""Integrator for the singular radial IVP and verification checks on its output.

The profile equation is integrated in the variables (V, P) = (v^m, (v^m)'),
in which the equation is linear in V'' and the launch from the singular
origin is well conditioned.  The origin itself is never touched: integration
starts from a two-term even series at a small launch radius r0, runs in r up
to r = 1, then switches to s = ln(r) so the power-law tail costs O(log r_max)
steps.  The hot stepping loop lives in the kernel modules (_stepper_py /
_stepper_cy); this module owns launch, coordinate handling, dense output, and
the residual/bound checks.

Accuracy model: local stepping error per step is held at `tol` (relative),
and the step cap in log-radius units is chosen so the cubic-Hermite dense
output stays within a small multiple of `tol` as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _stepper, model
from .exceptions import (
    CurveRangeError,
    DomainError,
    ParameterError,
    PositivityError,
    PositivityLossError,
    StepSizeUnderflowError,
)

DEFAULT_R0 = 1e-4
DEFAULT_R_MAX = 1e6
DEFAULT_TOL = 1e-10
TOL_MIN = 1e-12
TOL_MAX = 1e-3

#: Dense-output error is kept below roughly this multiple of the stepping tol.
_INTERP_TOL_FACTOR = 10.0
_TINY = 1e-300


class RadialState(NamedTuple):
    """One sample of the integrated variables: radius, V = v^m, P = (v^m)'."""

    r: float
    V: float
    P: float


def series_coefficient(params) -> float:
    """Quadratic coefficient V2 of the origin series V(r) = eta^m + V2 r^2 + O(r^4).

    Obtained by substituting the even series into the profile equation and
    matching the constant term: (n-1)/m * 2n*V2 + alpha*eta = 0.
    """
    n = params.n
    return -params.m * params.alpha * params.eta / (2.0 * n * (n - 1.0))


def series_origin(params, r0: float = DEFAULT_R0) -> RadialState:
    """Launch state at radius r0 from the two-term even origin series."""
    if not (r0 > 0.0):
        raise DomainError(f"launch radius must be positive, got {r0}")
    V2 = series_coefficient(params)
    return RadialState(r=r0, V=params.eta**params.m + V2 * r0 * r0, P=2.0 * V2 * r0)


def rhs(params, state: RadialState):
    """Right side (dV/dr, dP/dr) of the first-order system at a state.

    Exact rearrangement of the profile equation with v = V^(1/m):

        dP/dr = -(n-1)/r * P - V^(1/m-1) * (m*alpha/(n-1) * V + beta/(n-1) * r * P)
    """
    r, V, P = state.r, state.V, state.P
    if r <= 0.0:
        raise DomainError(f"radius must be positive, got r={r}")
    if V <= 0.0:
        raise PositivityError(f"positivity breakdown: v^m = {V} <= 0 at r={r}")
    n, m = params.n, params.m
    em1 = 1.0 / m - 1.0
    dP = -(n - 1.0) / r * P - V**em1 * (
        m * params.alpha / (n - 1.0) * V + params.beta / (n - 1.0) * r * P
    )
    return P, dP


def _hmax_cap(params, tol: float) -> float:
    # Cubic Hermite on a step of size h in log radius carries a relative
    # error ~ (h*q)^4/384 with q the tail log-slope of V; keep that within
    # _INTERP_TOL_FACTOR * tol.
    q = 2.0 * params.m / (1.0 - params.m)
    cap = (384.0 * _INTERP_TOL_FACTOR * tol) ** 0.25 / max(1.0, q)
    return min(0.25, cap)


class SolutionCurve:
    """Dense numerical solution of the radial IVP on [r0, r_max].

    Stores the accepted integration nodes (r, V, P, dP/dr) and evaluates
    anywhere in range by cubic Hermite interpolation in the integration
    coordinate of each segment (r below radius 1, ln r beyond).  Immutable
    after construction apart from lazily built caches; safe to share between
    threads, and concurrent integrations of different parameters are
    independent.
    """

    def __init__(self, params, r, V, P, dPdr, tol, status, diagnostics):
        self.params = params
        self.r = np.asarray(r, dtype=float)
        self.V = np.asarray(V, dtype=float)
        self.P = np.asarray(P, dtype=float)
        self.dPdr = np.asarray(dPdr, dtype=float)
        self.tol = float(tol)
        self.status = status  # 'ok' | 'positivity_loss' | 'step_underflow'
        self.diagnostics = diagnostics
        self._lnr = np.log(self.r)
        # Segment i spans nodes (i, i+1); log coordinate once past radius 1.
        self._seg_log = self.r[:-1] >= 1.0 - 1e-12
        self._cum_integral = None

    # -- basic geometry of the grid ------------------------------------

    @property
    def grid(self) -> np.ndarray:
        return self.r

    @property
    def r_first(self) -> float:
        return float(self.r[0])

    @property
    def r_last(self) -> float:
        return float(self.r[-1])

    @property
    def states(self):
        return [RadialState(float(a), float(b), float(c)) for a, b, c in zip(self.r, self.V, self.P)]

    def __len__(self):
        return self.r.size

    # -- dense output ---------------------------------------------------

    def _locate(self, rq):
        rq = np.asarray(rq, dtype=float)
        scalar = rq.ndim == 0
        rq = np.atleast_1d(rq)
        lo, hi = self.r_first, self.r_last
        if np.any(rq < lo * (1.0 - 1e-12)) or np.any(rq > hi * (1.0 + 1e-12)):
            raise CurveRangeError(
                f"radius outside curve range [{lo:.6g}, {hi:.6g}]"
            )
        rq = np.clip(rq, lo, hi)
        idx = np.searchsorted(self.r, rq, side="right") - 1
        idx = np.clip(idx, 0, self.r.size - 2)
        return rq, idx, scalar

    def _hermite(self, rq, idx, want_slope):
        """Interpolate V and P (and optionally dP/dr) at query radii."""
        seg_log = self._seg_log[idx]
        x0 = np.where(seg_log, self._lnr[idx], self.r[idx])
        x1 = np.where(seg_log, self._lnr[idx + 1], self.r[idx + 1])
        xq = np.where(seg_log, np.log(rq), rq)
        h = x1 - x0
        h = np.where(h == 0.0, 1.0, h)  # degenerate segments: theta -> 0
        t = np.clip((xq - x0) / h, 0.0, 1.0)

        # Node derivatives with respect to the segment coordinate.
        r0n, r1n = self.r[idx], self.r[idx + 1]
        dV0 = np.where(seg_log, r0n * self.P[idx], self.P[idx])
        dV1 = np.where(seg_log, r1n * self.P[idx + 1], self.P[idx + 1])
        dP0 = np.where(seg_log, r0n * self.dPdr[idx], self.dPdr[idx])
        dP1 = np.where(seg_log, r1n * self.dPdr[idx + 1], self.dPdr[idx + 1])

        t2 = t * t
        t3 = t2 * t
        h00 = 2.0 * t3 - 3.0 * t2 + 1.0
        h10 = t3 - 2.0 * t2 + t
        h01 = -2.0 * t3 + 3.0 * t2
        h11 = t3 - t2

        V = h00 * self.V[idx] + h10 * h * dV0 + h01 * self.V[idx + 1] + h11 * h * dV1
        P = h00 * self.P[idx] + h10 * h * dP0 + h01 * self.P[idx + 1] + h11 * h * dP1
        if not want_slope:
            return V, P, None
        # Derivative of the P-interpolant, mapped back to d/dr.
        g00 = (6.0 * t2 - 6.0 * t) / h
        g10 = 3.0 * t2 - 4.0 * t + 1.0
        g01 = (-6.0 * t2 + 6.0 * t) / h
        g11 = 3.0 * t2 - 2.0 * t
        dPdx = g00 * self.P[idx] + g10 * dP0 + g01 * self.P[idx + 1] + g11 * dP1
        dPdr = np.where(seg_log, dPdx / rq, dPdx)
        return V, P, dPdr

    @staticmethod
    def _ret(scalar, *arrays):
        out = tuple(float(a[0]) if scalar else a for a in arrays)
        return out[0] if len(out) == 1 else out

    def eval_vm(self, rq):
        """(V, P) = (v^m, (v^m)') at any radius in range."""
        rq, idx, scalar = self._locate(rq)
        V, P, _ = self._hermite(rq, idx, want_slope=False)
        return self._ret(scalar, V, P)

    def eval_vm_with_slope(self, rq):
        """(V, P, dP/dr) with dP/dr taken from the interpolant derivative.

        This second derivative is independent of the profile equation, which
        makes it the right input for residual checks; for the most accurate
        v'' see eval_v.
        """
        rq, idx, scalar = self._locate(rq)
        V, P, dPdr = self._hermite(rq, idx, want_slope=True)
        return self._ret(scalar, V, P, dPdr)

    def _v_triplet(self, rq, V, P, dPdr):
        inv_m = 1.0 / self.params.m
        v = V**inv_m
        vim1 = V ** (inv_m - 1.0)
        vp = inv_m * vim1 * P
        vpp = inv_m * (inv_m - 1.0) * V ** (inv_m - 2.0) * P * P + inv_m * vim1 * dPdr
        return v, vp, vpp

    def eval_v(self, rq):
        """(v, v', v'') with v'' from re-evaluating the equation right side
        at the interpolated (V, P) — one order more accurate than
        differentiating the interpolant."""
        rq, idx, scalar = self._locate(rq)
        V, P, _ = self._hermite(rq, idx, want_slope=False)
        dPdr = self._rhs_dP(rq, V, P)
        return self._ret(scalar, *self._v_triplet(rq, V, P, dPdr))

    def eval_v_measured(self, rq):
        """(v, v', v'') with v'' from the interpolant derivative (equation-independent)."""
        rq, idx, scalar = self._locate(rq)
        V, P, dPdr = self._hermite(rq, idx, want_slope=True)
        return self._ret(scalar, *self._v_triplet(rq, V, P, dPdr))

    def _rhs_dP(self, r, V, P):
        p = self.params
        n, m = p.n, p.m
        em1 = 1.0 / m - 1.0
        return -(n - 1.0) / r * P - V**em1 * (
            m * p.alpha / (n - 1.0) * V + p.beta / (n - 1.0) * r * P
        )

    def w(self, rq):
        """Decay quantity w(r) = r^2 v(r)^(1-m)."""
        rq_, idx, scalar = self._locate(rq)
        V, _, _ = self._hermite(rq_, idx, want_slope=False)
        inv_m = 1.0 / self.params.m
        return self._ret(scalar, rq_ * rq_ * V ** (inv_m - 1.0))

    def logslope(self, rq):
        """Logarithmic slope r v'(r)/v(r)."""
        rq_, idx, scalar = self._locate(rq)
        V, P, _ = self._hermite(rq_, idx, want_slope=False)
        return self._ret(scalar, rq_ * P / (self.params.m * V))

    # -- cumulative quadrature -------------------------------------------

    def _node_integrand(self):
        n = self.params.n
        inv_m = 1.0 / self.params.m
        return self.r ** (n - 1) * self.V**inv_m

    def _ensure_cum_integral(self):
        """Cumulative integral of z^(n-1) v(z) from 0 to each node.

        Series contribution on [0, r0] plus per-segment Simpson with the
        midpoint from dense output; matches the integrator's accuracy.
        """
        if self._cum_integral is not None:
            return
        p = self.params
        n = p.n
        r0 = self.r_first
        V2 = series_coefficient(p)
        head = p.eta * r0**n / n + (V2 * p.eta ** (1.0 - p.m) / p.m) * r0 ** (n + 2) / (n + 2)

        a = self.r[:-1]
        b = self.r[1:]
        mid = 0.5 * (a + b)
        Vm, _ = self.eval_vm(mid)
        f_nodes = self._node_integrand()
        f_mid = mid ** (n - 1) * Vm ** (1.0 / p.m)
        seg = (b - a) / 6.0 * (f_nodes[:-1] + 4.0 * f_mid + f_nodes[1:])
        cum = np.empty(self.r.size)
        cum[0] = head
        np.cumsum(seg, out=cum[1:])
        cum[1:] += head
        self._cum_integral = cum

    def integral_to(self, rq: float) -> float:
        """Integral of z^(n-1) v(z) dz from 0 to rq (rq within range)."""
        self._ensure_cum_integral()
        rq_arr, idx, _ = self._locate(float(rq))
        rq_ = float(rq_arr[0])
        i = int(idx[0])
        a = float(self.r[i])
        if rq_ == a:
            return float(self._cum_integral[i])
        n = self.params.n
        inv_m = 1.0 / self.params.m
        pts = np.array([a, 0.5 * (a + rq_), rq_])
        Vp, _ = self.eval_vm(pts)
        f = pts ** (n - 1) * Vp**inv_m
        return float(self._cum_integral[i] + (rq_ - a) / 6.0 * (f[0] + 4.0 * f[1] + f[2]))


def integrate(
    params,
    r_max: float = DEFAULT_R_MAX,
    tol: float = DEFAULT_TOL,
    r0: float = DEFAULT_R0,
    allow_any_regime: bool = False,
) -> SolutionCurve:
    """Integrate the radial IVP from the series launch at r0 out to r_max.

    Adaptive Dormand-Prince 5(4) with local error per step at `tol`
    (relative) and dense cubic-Hermite output.  Outside the decay regime the
    profile may vanish at finite radius; integration then stops with
    PositivityLossError carrying the partial curve.

    Raises ParameterError unless the decay hypotheses hold or
    allow_any_regime is set.
    """
    tag = model.classify(params)
    if not (tag.theorem_applies or allow_any_regime):
        raise ParameterError(
            f"parameters outside the decay regime: {tag.reason} "
            "(pass allow_any_regime=True to integrate anyway)"
        )
    if not (TOL_MIN <= tol <= TOL_MAX):
        raise ParameterError(f"tol must lie in [{TOL_MIN:g}, {TOL_MAX:g}], got {tol:g}")
    if not (0.0 < r0 < 1.0):
        raise ParameterError(f"launch radius r0 must lie in (0, 1), got {r0:g}")
    if not (r_max > r0):
        raise ParameterError(f"r_max must exceed r0={r0:g}, got {r_max:g}")

    n, m = params.n, params.m
    alpha, beta = params.alpha, params.beta
    launch = series_origin(params, r0)
    if launch.V <= 0.0 or abs(launch.V - params.eta**m) > 0.1 * params.eta**m:
        raise ParameterError(
            f"launch radius r0={r0:g} is outside the series' validity for eta={params.eta:g}; "
            "choose r0 well inside the flat core (r0^2 << eta^(m-1))"
        )
    _, dP0 = rhs(params, launch)

    cap = _hmax_cap(params, tol)
    rs = [r0]
    Vs = [launch.V]
    Ps = [launch.P]
    dPs = [dP0]
    naccept = nreject = 0
    nfev = 0
    status_code = _stepper.STATUS_OK
    h_last = 0.1 * cap * r0

    r_lin_end = min(1.0, r_max)
    xs, vs, ps, dps, status_code, h_last, na, nr, nf = _stepper.integrate_region(
        n, m, alpha, beta, 0, r0, r_lin_end, launch.V, launch.P, tol, h_last, cap
    )
    rs += xs
    Vs += vs
    Ps += ps
    dPs += dps
    naccept += na
    nreject += nr
    nfev += nf

    if status_code == _stepper.STATUS_OK and r_max > 1.0:
        s_end = math.log(r_max)
        Q0 = Ps[-1] * rs[-1]  # r = 1 here, kept explicit for clarity
        xs, vs, ps, dps, status_code, h_last, na, nr, nf = _stepper.integrate_region(
            n, m, alpha, beta, 1, 0.0, s_end, Vs[-1], Q0, tol, min(h_last, cap), cap
        )
        rr = [math.exp(s) for s in xs]
        if status_code == _stepper.STATUS_OK and rr:
            rr[-1] = r_max  # exp(log(r_max)) to round-off; pin exactly
        rs += rr
        Vs += vs
        Ps += ps
        dPs += dps
        naccept += na
        nreject += nr
        nfev += nf

    diagnostics = {
        "naccept": naccept,
        "nreject": nreject,
        "nfev": nfev,
        "backend": _stepper.backend_name(),
        "hmax_cap": cap,
    }
    status = {
        _stepper.STATUS_OK: "ok",
        _stepper.STATUS_POSITIVITY: "positivity_loss",
        _stepper.STATUS_UNDERFLOW: "step_underflow",
    }[status_code]
    curve = SolutionCurve(params, rs, Vs, Ps, dPs, tol, status, diagnostics)

    if status == "positivity_loss":
        raise PositivityLossError(
            f"profile positivity lost near r = {curve.r_last:.6g} "
            "(expected outside the decay regime)",
            curve=curve,
            r_last=curve.r_last,
        )
    if status == "step_underflow":
        raise StepSizeUnderflowError(
            f"step size underflow at r = {curve.r_last:.6g}: tolerance unreachable",
            curve=curve,
            r_last=curve.r_last,
        )
    return curve


# -- residual and bound checks ----------------------------------------------


def ode_residual(curve, r: float) -> float:
    """Relative residual of the profile equation at radius r.

    Uses the equation-independent second derivative (interpolant-based for
    numerical curves, exact for analytic profiles) and normalizes by
    alpha * v(r).
    """
    p = curve.params
    n, m = p.n, p.m
    V, P, dPdr = curve.eval_vm_with_slope(r)
    inv_m = 1.0 / m
    v = V**inv_m
    vp = inv_m * V ** (inv_m - 1.0) * P
    lhs = (n - 1.0) / m * (dPdr + (n - 1.0) / r * P) + p.alpha * v + p.beta * r * vp
    denom = abs(p.alpha) * v
    if denom == 0.0:
        denom = max(abs((n - 1.0) / m * (dPdr + (n - 1.0) / r * P)), abs(p.beta * r * vp), _TINY)
    return float(lhs / denom)


def integral_identity_residual(curve, r: float) -> float:
    """Relative mismatch of the integrated form of the equation at radius r:

        -(n-1)/m (v^m)'(r)  vs  beta r v(r) + (alpha - n beta)/r^(n-1) * I(r),

    with I(r) the integral of z^(n-1) v(z) from 0 to r (series head below the
    launch radius, per-segment Simpson on dense output beyond).  Assumes a
    profile regular at the origin with v(0) = eta.
    """
    p = curve.params
    n, m = p.n, p.m
    V, P = curve.eval_vm(r)
    v = V ** (1.0 / m)
    lhs = -(n - 1.0) / m * P
    if hasattr(curve, "integral_to"):
        integral = curve.integral_to(r)
    else:
        integral = _integral_to_generic(curve, r)
    rhs_val = p.beta * r * v + (p.alpha - n * p.beta) / r ** (n - 1.0) * integral
    return float((lhs - rhs_val) / max(abs(lhs), abs(rhs_val), _TINY))


def _integral_to_generic(curve, r):
    """Quadrature fallback for curve-likes without a cached integral."""
    p = curve.params
    n = p.n
    r0 = curve.r_first
    V2 = series_coefficient(p)
    head = p.eta * r0**n / n + (V2 * p.eta ** (1.0 - p.m) / p.m) * r0 ** (n + 2) / (n + 2)
    grid = curve.grid
    grid = grid[grid < r]
    pts = np.append(grid, r)
    a, b = pts[:-1], pts[1:]
    mid = 0.5 * (a + b)
    inv_m = 1.0 / p.m

    def f(z):
        V, _ = curve.eval_vm(z)
        return z ** (n - 1) * V**inv_m

    seg = (b - a) / 6.0 * (f(a) + 4.0 * f(mid) + f(b))
    return head + float(np.sum(seg))


@dataclass(frozen=True)
class BoundReport:
    """Pointwise verdicts of the closed-form envelopes along a curve.

    The lower envelope applies when beta > 0 and alpha <= n beta; the upper
    when alpha >= n beta > 0; at alpha = n beta both apply and pinch the
    profile.  Margins are relative to the envelope value; `holds` allows the
    stated slack.
    """

    lower_applies: bool
    upper_applies: bool
    lower_holds: bool | None
    upper_holds: bool | None
    lower_worst_margin: float | None
    lower_worst_r: float | None
    upper_worst_margin: float | None
    upper_worst_r: float | None
    slack: float


def lower_envelope(params, r):
    """Closed-form lower bound (eta^(m-1) + (1-m)beta/(2(n-1)) r^2)^(-1/(1-m))."""
    n, m = params.n, params.m
    base = params.eta ** (m - 1.0) + (1.0 - m) * params.beta / (2.0 * (n - 1.0)) * r * r
    return base ** (-1.0 / (1.0 - m))


def upper_envelope(params, r):
    """Closed-form upper bound (eta^(m-1) + alpha(1-m)/(2n(n-1)) r^2)^(-1/(1-m))."""
    n, m = params.n, params.m
    base = params.eta ** (m - 1.0) + params.alpha * (1.0 - m) / (2.0 * n * (n - 1.0)) * r * r
    return base ** (-1.0 / (1.0 - m))


def bound_check(curve, slack: float = 1e-12) -> BoundReport:
    """Check the applicable closed-form envelopes at every stored sample."""
    p = curve.params
    tag = model.classify(p)
    lower_applies = p.beta > 0.0 and tag.alpha_vs_nbeta in ("less", "equal")
    upper_applies = p.n * p.beta > 0.0 and tag.alpha_vs_nbeta in ("greater", "equal")

    r = np.asarray(curve.grid, dtype=float)
    if isinstance(curve, SolutionCurve):
        v = curve.V ** (1.0 / p.m)
    else:
        v, _, _ = curve.eval_v(r)

    lo_holds = lo_margin = lo_r = None
    up_holds = up_margin = up_r = None
    if lower_applies:
        lo = lower_envelope(p, r)
        margins = (v - lo) / lo
        i = int(np.argmin(margins))
        lo_margin, lo_r = float(margins[i]), float(r[i])
        lo_holds = bool(lo_margin >= -slack)
    if upper_applies:
        up = upper_envelope(p, r)
        margins = (up - v) / up
        i = int(np.argmin(margins))
        up_margin, up_r = float(margins[i]), float(r[i])
        up_holds = bool(up_margin >= -slack)

    return BoundReport(
        lower_applies=lower_applies,
        upper_applies=upper_applies,
        lower_holds=lo_holds,
        upper_holds=up_holds,
        lower_worst_margin=lo_margin,
        lower_worst_r=lo_r,
        upper_worst_margin=up_margin,
        upper_worst_r=up_r,
        slack=slack,
    )
