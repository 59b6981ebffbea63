"""Curvature of the conformal metric g = v^(4/(n+2)) dx^2 along a profile.

Defined for the conformal exponent m = (n-2)/(n+2), where 4/(n+2) = 1 - m.
The rotationally symmetric metric is put in warped-product normal form

    g = dt^2 + f(t)^2 dOmega^2,   dt = v^((1-m)/2) dr,   f = r v^((1-m)/2),

from which the two independent sectional curvatures are

    K0 = -f_tt / f          (2-planes containing the radial direction)
    K1 = (1 - f_t^2) / f^2  (2-planes tangent to the spheres)

with arclength derivatives obtained by chain rule from (v, v', v'').  Note
f^2 = w(r), so the spherical curvature is tied directly to the decay
quantity.  The scalar curvature on profile solutions has the closed form
R = (1-m)(alpha + beta r v'/v); the warped-product expression
R = (n-1)(2 K0 + (n-2) K1) holds for any metric of this form and serves as a
consistency check.

Sign conventions (round sphere K0 = K1 = +1, flat space 0) are validated by
built-in synthetic closed forms the first time curvature is evaluated.

On decay-regime shrinking solitons:  R -> rho,  K0 -> 0,
K1 -> rho/((n-1)(n-2))  as r -> infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .asymptotics import DEFAULT_LADDER_COUNT, DEFAULT_LADDER_RATIO, aitken_limit, ladder_radii
from .exceptions import NotYamabeError, YdecayError


def curvatures_from_derivatives(m: float, r, v, vp, vpp):
    """(K0, K1) of g = v^(1-m) dx^2 from pointwise profile derivatives."""
    phi = 0.5 * (1.0 - m)
    ls = r * vp / v
    f_t = 1.0 + phi * ls
    conf = v ** (1.0 - m)  # = v^(2*phi)
    f2 = r * r * conf
    # f_tt = phi * (v'/v + r v''/v - r (v'/v)^2) / v^phi, and K0 = -f_tt/f
    # with f = r v^phi, so K0 = -phi * (...) / (r * v^(1-m)).
    bracket = vp / v + r * vpp / v - r * (vp / v) ** 2
    K0 = -phi * bracket / (r * conf)
    K1 = (1.0 - f_t * f_t) / f2
    return K0, K1


def warped_scalar_from_derivatives(n: int, m: float, r, v, vp, vpp):
    """Scalar curvature (n-1)(2 K0 + (n-2) K1), valid for any conformal factor."""
    K0, K1 = curvatures_from_derivatives(m, r, v, vp, vpp)
    return (n - 1.0) * (2.0 * K0 + (n - 2.0) * K1)


_conventions_checked = False


def validate_sign_conventions():
    """One-time synthetic check of the warped-product formulas.

    Flat space (v = 1) must give K0 = K1 = 0; the unit round sphere in
    stereographic coordinates (v^(1-m) = 4/(1+r^2)^2) must give
    K0 = K1 = 1 and scalar curvature n(n-1).  Raises on mismatch.
    """
    global _conventions_checked
    if _conventions_checked:
        return
    n, m = 3, 0.2  # any admissible pair; the formulas depend on v^(1-m) only
    r = np.array([0.31, 0.7, 1.9])

    K0, K1 = curvatures_from_derivatives(m, r, np.ones_like(r), np.zeros_like(r), np.zeros_like(r))
    if np.max(np.abs(K0)) > 1e-12 or np.max(np.abs(K1)) > 1e-12:
        raise YdecayError("curvature convention check failed on flat space")

    e = 2.0 / (1.0 - m)
    d = 1.0 + r * r
    v = (2.0 / d) ** e
    L = -2.0 * e * r / d  # d(ln v)/dr
    Lp = 2.0 * e * (r * r - 1.0) / (d * d)
    vp = v * L
    vpp = v * (L * L + Lp)
    K0, K1 = curvatures_from_derivatives(m, r, v, vp, vpp)
    Rw = warped_scalar_from_derivatives(n, m, r, v, vp, vpp)
    if (
        np.max(np.abs(K0 - 1.0)) > 1e-10
        or np.max(np.abs(K1 - 1.0)) > 1e-10
        or np.max(np.abs(Rw - n * (n - 1.0))) > 1e-9
    ):
        raise YdecayError("curvature convention check failed on the round sphere")
    _conventions_checked = True


def _require_yamabe(params):
    tag = model.classify(params)
    if not tag.yamabe_case:
        raise NotYamabeError(
            f"curvature requires the conformal exponent m = (n-2)/(n+2) = "
            f"{params.m_conformal:.12g}, got m = {params.m}"
        )


@dataclass(frozen=True)
class GeometrySample:
    """Scalar and sectional curvatures of the soliton metric at one radius."""

    r: float
    R: float
    K0: float
    K1: float


def scalar_curvature(curve, r):
    """R(r) = (1-m)(alpha + beta r v'/v), the soliton scalar curvature."""
    _require_yamabe(curve.params)
    p = curve.params
    return (1.0 - p.m) * (p.alpha + p.beta * curve.logslope(r))


def sectional_curvatures(curve, r):
    """(K0, K1) at radius r via the warped-product reduction."""
    _require_yamabe(curve.params)
    validate_sign_conventions()
    v, vp, vpp = curve.eval_v(r)
    return curvatures_from_derivatives(curve.params.m, np.asarray(r, dtype=float), v, vp, vpp)


def warped_scalar_curvature(curve, r, measured: bool = False):
    """Scalar curvature assembled from the warped-product second fundamental
    form; with measured=True the equation-independent v'' is used, making the
    agreement with scalar_curvature a genuine numerical consistency check."""
    _require_yamabe(curve.params)
    validate_sign_conventions()
    evalf = curve.eval_v_measured if measured else curve.eval_v
    v, vp, vpp = evalf(r)
    p = curve.params
    return warped_scalar_from_derivatives(p.n, p.m, np.asarray(r, dtype=float), v, vp, vpp)


def curvature_sample(curve, r) -> GeometrySample:
    K0, K1 = sectional_curvatures(curve, r)
    return GeometrySample(
        r=float(r), R=float(scalar_curvature(curve, r)), K0=float(K0), K1=float(K1)
    )


@dataclass(frozen=True)
class CurvatureReport:
    """Extrapolated curvature limits along a geometric radius ladder."""

    radii: tuple
    R_samples: tuple
    K0_samples: tuple
    K1_samples: tuple
    R_limit: float
    K0_limit: float
    K1_limit: float
    R_target: float
    K0_target: float
    K1_target: float
    R_rel_deviation: float
    K0_abs_deviation: float
    K1_rel_deviation: float
    deviations_monotone_last3: tuple  # (R, K0, K1) booleans


def curvature_limits(
    curve,
    ladder_ratio: float = DEFAULT_LADDER_RATIO,
    count: int = DEFAULT_LADDER_COUNT,
    r_top: float | None = None,
) -> CurvatureReport:
    """Extrapolate R, K0, K1 along the ladder and compare with the shrinking
    soliton targets (rho, 0, rho/((n-1)(n-2)))."""
    _require_yamabe(curve.params)
    validate_sign_conventions()
    p = curve.params
    if r_top is None:
        r_top = curve.r_last
    radii = ladder_radii(r_top, ladder_ratio, count)

    v, vp, vpp = curve.eval_v(radii)
    K0, K1 = curvatures_from_derivatives(p.m, radii, v, vp, vpp)
    R = (1.0 - p.m) * (p.alpha + p.beta * radii * vp / v)

    R_lim, _, _ = aitken_limit(R)
    K0_lim, _, _ = aitken_limit(K0)
    K1_lim, _, _ = aitken_limit(K1)

    R_target = p.rho
    K0_target = 0.0
    K1_target = p.rho / ((p.n - 1.0) * (p.n - 2.0))

    def mono_last3(samples, target):
        d = np.abs(np.asarray(samples) - target)
        return bool(d[-3] > d[-2] > d[-1])

    return CurvatureReport(
        radii=tuple(radii.tolist()),
        R_samples=tuple(np.asarray(R).tolist()),
        K0_samples=tuple(np.asarray(K0).tolist()),
        K1_samples=tuple(np.asarray(K1).tolist()),
        R_limit=float(R_lim),
        K0_limit=float(K0_lim),
        K1_limit=float(K1_lim),
        R_target=float(R_target),
        K0_target=K0_target,
        K1_target=float(K1_target),
        R_rel_deviation=float(abs(R_lim - R_target) / abs(R_target)),
        K0_abs_deviation=float(abs(K0_lim)),
        K1_rel_deviation=float(abs(K1_lim - K1_target) / abs(K1_target)),
        deviations_monotone_last3=(
            mono_last3(R, R_target),
            mono_last3(K0, K0_target),
            mono_last3(K1, K1_target),
        ),
    )
