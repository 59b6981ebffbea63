"""Limit estimation along solution curves: decay coefficient, log-slope,
subsequential value bands, and convergence of the rescaled family.

The decay quantity is w(r) = r^2 v(r)^(1-m); on decay-regime curves it tends
to the closed-form w_infinity and the log-slope r v'/v tends to -2/(1-m).
No convergence *rate* is available in closed form, so limits are estimated by
iterated Aitken delta-squared extrapolation over a geometric radius ladder,
with a noise guard: extrapolation levels are accepted only while successive
levels keep agreeing better, and the claimed precision is the agreement of
the accepted level.  All functions here are pure and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model
from .exceptions import CurveTooShortError, LadderError
from .profiles import singular_profile

DEFAULT_LADDER_RATIO = 2.0
DEFAULT_LADDER_COUNT = 12
#: `converged` requires successive extrapolation levels to agree within this
#: multiple of the integration tolerance (relative to max(1, |limit|)).
CONV_TOL_FACTOR = 10.0


def aitken_limit(seq):
    """Iterated Aitken delta-squared with a noise guard.

    Returns (limit, residual, levels): `levels[0]` is the input sequence and
    each further level is one delta-squared pass.  Passes stop at the first
    level whose final value agrees *worse* with its predecessor than the
    previous pair did (round-off amplification), or when differences fall to
    round-off.  `residual` is the final-value agreement of the accepted level
    with the level before it; it is the claimed precision only when the
    sequence actually converged.

    Exact on geometric error sequences: w + c*theta^k is recovered to
    round-off in one pass.
    """
    seq = [float(x) for x in seq]
    if len(seq) < 3:
        raise LadderError("need at least 3 samples for extrapolation")
    levels = [seq]
    deltas = []
    while len(levels[-1]) >= 3:
        cur = levels[-1]
        nxt = []
        degenerate = False
        for a, b, c in zip(cur, cur[1:], cur[2:]):
            d1 = b - a
            d2 = c - b
            den = d2 - d1
            if den == 0.0 or abs(den) <= 8e-16 * (abs(b) + abs(c)):
                degenerate = True
                break
            nxt.append(c - d2 * d2 / den)
        if degenerate or not nxt:
            break
        delta = abs(nxt[-1] - levels[-1][-1])
        if deltas and delta >= deltas[-1]:
            break  # noise amplification: keep the previous level
        levels.append(nxt)
        deltas.append(delta)
        if delta == 0.0:
            break
    limit = levels[-1][-1]
    residual = deltas[-1] if deltas else abs(levels[0][-1] - levels[0][-2])
    return limit, residual, levels


@dataclass(frozen=True)
class DecayEstimate:
    """Extrapolated limits of w(r) and r v'/v with convergence diagnostics.

    `converged` means both extrapolations stabilized to within
    CONV_TOL_FACTOR times the integration tolerance; when False the limits
    are best-effort and `w_residual`/`logslope_residual` underestimate the
    true remaining drift.
    """

    w_samples: tuple
    logslope_samples: tuple
    w_limit: float
    logslope_limit: float
    ladder_ratio: float
    converged: bool
    w_residual: float
    logslope_residual: float
    count: int = field(default=DEFAULT_LADDER_COUNT)

    @property
    def radii(self):
        return tuple(r for r, _ in self.w_samples)


def ladder_radii(r_top: float, ratio: float, count: int) -> np.ndarray:
    """Geometric radius ladder r_top * ratio^-(count-1) ... r_top (increasing)."""
    if not (ratio > 1.0):
        raise LadderError(f"ladder ratio must exceed 1, got {ratio}")
    if count < 3:
        raise LadderError(f"ladder count must be at least 3, got {count}")
    return r_top * ratio ** -np.arange(count - 1, -1, -1, dtype=float)


def decay_estimate(
    curve,
    ladder_ratio: float = DEFAULT_LADDER_RATIO,
    count: int = DEFAULT_LADDER_COUNT,
    r_top: float | None = None,
) -> DecayEstimate:
    """Estimate lim w(r) and lim r v'/v from a curve along a geometric ladder.

    The ladder tops out at the curve's last radius by default.  Raises
    LadderError when the ladder would leave the curve's range.
    """
    if r_top is None:
        r_top = curve.r_last
    radii = ladder_radii(r_top, ladder_ratio, count)
    if radii[0] < curve.r_first or r_top > curve.r_last * (1 + 1e-12):
        raise LadderError(
            f"ladder [{radii[0]:.4g}, {r_top:.4g}] exceeds curve range "
            f"[{curve.r_first:.4g}, {curve.r_last:.4g}]"
        )
    w_seq = np.asarray(curve.w(radii), dtype=float)
    ls_seq = np.asarray(curve.logslope(radii), dtype=float)

    w_limit, w_res, _ = aitken_limit(w_seq)
    ls_limit, ls_res, _ = aitken_limit(ls_seq)

    tol = getattr(curve, "tol", 1e-14) or 1e-14
    conv = (
        w_res <= CONV_TOL_FACTOR * tol * max(1.0, abs(w_limit))
        and ls_res <= CONV_TOL_FACTOR * tol * max(1.0, abs(ls_limit))
    )
    return DecayEstimate(
        w_samples=tuple(zip(radii.tolist(), w_seq.tolist())),
        logslope_samples=tuple(zip(radii.tolist(), ls_seq.tolist())),
        w_limit=float(w_limit),
        logslope_limit=float(ls_limit),
        ladder_ratio=float(ladder_ratio),
        converged=bool(conv),
        w_residual=float(w_res),
        logslope_residual=float(ls_res),
        count=int(count),
    )


@dataclass(frozen=True)
class SubsequenceReport:
    """Band check of w along the far tail of a curve.

    In the decay regime the profile is not integrable, so every subsequential
    limit of w is 0 or w_infinity; the full limit being w_infinity, all far
    samples must sit in a band around it and stay away from the spurious
    value w_one.
    """

    burn_in: float
    band: float
    n_samples: int
    max_deviation: float
    within_band: bool
    w1_excluded: bool | None


def subsequence_value_check(curve, burn_in: float = 100.0, band: float = 0.05) -> SubsequenceReport:
    """Verify w stays within `band` of w_infinity at every node past `burn_in`,
    and (when alpha != n beta, beta > 0) that the tail does not cluster at w_one."""
    p = curve.params
    w_inf = model.w_infinity(p)
    r = np.asarray(curve.grid, dtype=float)
    sel = r >= burn_in
    if not np.any(sel):
        raise LadderError(f"no samples beyond burn-in radius {burn_in}")
    rs = r[sel]
    ws = np.asarray(curve.w(rs), dtype=float)
    dev = np.abs(ws - w_inf) / w_inf
    max_dev = float(dev.max())

    tag = model.classify(p)
    w1_excluded = None
    if p.beta > 0.0 and tag.alpha_vs_nbeta != "equal":
        w1 = model.w_one(p)
        tail = rs >= max(burn_in, rs[-1] / 100.0)
        w1_excluded = bool(np.all(np.abs(ws[tail] - w_inf) < np.abs(ws[tail] - w1)))

    return SubsequenceReport(
        burn_in=float(burn_in),
        band=float(band),
        n_samples=int(sel.sum()),
        max_deviation=max_dev,
        within_band=bool(max_dev <= band),
        w1_excluded=w1_excluded,
    )


@dataclass(frozen=True)
class RescalingReport:
    """Sup-distance of the rescaled family to the singular profile per ladder rung."""

    lambdas: tuple
    sup_errors: tuple
    radius_window: tuple
    monotone_decreasing: bool


def rescaling_convergence(curve, lambda_ladder, R: float, n_samples: int = 128) -> RescalingReport:
    """Check that lam^(2/(1-m)) v(lam r) approaches the singular profile.

    For each lam the sup over r in [R, 10R] of the relative distance to the
    singular profile is evaluated through the curve at radii lam*r, so the
    curve must reach 10*R*max(lambda).  The sup-errors must then decrease
    monotonically along the ladder.
    """
    if not (R > 0.0):
        raise LadderError(f"window radius R must be positive, got {R}")
    lambdas = [float(l) for l in lambda_ladder]
    if any(l <= 0.0 for l in lambdas):
        raise LadderError("all scaling factors must be positive")
    p = curve.params
    need = 10.0 * R * max(lambdas)
    if need > curve.r_last * (1 + 1e-12):
        raise CurveTooShortError(
            f"curve reaches r={curve.r_last:.4g} but the rescaling check needs {need:.4g}"
        )
    rq = np.geomspace(R, 10.0 * R, n_samples)
    sing = singular_profile(p, r_lo=R / 2.0, r_hi=20.0 * R)
    v0, _, _ = sing.eval_v(rq)
    power = 2.0 / (1.0 - p.m)
    sups = []
    for lam in lambdas:
        v_at, _, _ = curve.eval_v(lam * rq)
        v_lam = lam**power * v_at
        sups.append(float(np.max(np.abs(v_lam - v0) / v0)))
    mono = all(b < a for a, b in zip(sups, sups[1:]))
    return RescalingReport(
        lambdas=tuple(lambdas),
        sup_errors=tuple(sups),
        radius_window=(float(R), float(10.0 * R)),
        monotone_decreasing=bool(mono),
    )
