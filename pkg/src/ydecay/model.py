"""Problem parameters, regime classification, and closed-form quantities.

The object of study is the radial profile v(r) > 0 of

    (n-1)/m * ( (v^m)'' + (n-1)/r * (v^m)' ) + alpha*v + beta*r*v' = 0,
    v(0) = eta,  v'(0) = 0,

with 0 < m < (n-2)/n and the scaling relation alpha = (2*beta + rho)/(1 - m).
For rho > 0 and beta above a critical value the profile exists globally and

    w(r) = r^2 * v(r)^(1-m)  ->  w_infinity  as r -> infinity,

with w_infinity given in closed form below.  When m = (n-2)/(n+2) the metric
g = v^(4/(n+2)) dx^2 is a locally conformally flat shrinking Yamabe gradient
soliton and w_infinity reduces to (n-1)(n-2)/rho.

Everything in this module is closed-form arithmetic; no integration happens
here.  All types are immutable and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .exceptions import DomainError, ParameterError

#: Relative tolerance for the measure-zero regime comparisons (alpha vs
#: n*beta, m vs (n-2)/(n+2)).  Users selecting these special cases type exact
#: values, so a tight default is appropriate; it can be overridden per call.
REGIME_REL_TOL = 1e-12


def _rel_close(a: float, b: float, rel_tol: float) -> bool:
    return abs(a - b) <= rel_tol * max(abs(a), abs(b), 1.0)


def derive_alpha(n: int, m: float, beta: float, rho: float) -> float:
    """Return alpha = (2*beta + rho)/(1 - m).

    alpha is never a free parameter: it is always derived from (beta, rho) so
    the scaling relation cannot be violated by construction.
    """
    if not (0.0 < m < 1.0):
        raise ParameterError(f"m must lie in (0, 1) to derive alpha, got m={m}")
    return (2.0 * beta + rho) / (1.0 - m)


@dataclass(frozen=True)
class ProblemParams:
    """Validated (n, m, beta, rho, eta) tuple.

    Only hard constraints are enforced at construction (n >= 3 integer,
    0 < m < 1, eta > 0, finite values).  Softer regime hypotheses such as
    m < (n-2)/n or the beta lower bound are classification data, not
    construction errors; see :func:`classify`.
    """

    n: int
    m: float
    beta: float
    rho: float
    eta: float

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise ParameterError(f"dimension n must be an integer, got {self.n!r}")
        if self.n < 3:
            raise ParameterError(f"dimension n must be >= 3, got n={self.n}")
        if not (0.0 < self.m < 1.0):
            raise ParameterError(f"exponent m must lie in (0, 1), got m={self.m}")
        if not (self.eta > 0.0):
            raise ParameterError(f"initial height eta must be positive, got eta={self.eta}")
        for name in ("m", "beta", "rho", "eta"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")

    @property
    def alpha(self) -> float:
        """Derived linear coefficient (2*beta + rho)/(1 - m)."""
        return derive_alpha(self.n, self.m, self.beta, self.rho)

    @property
    def m_upper(self) -> float:
        """Upper end (n-2)/n of the admissible fast-diffusion range for m."""
        return (self.n - 2.0) / self.n

    @property
    def m_conformal(self) -> float:
        """Conformal (Yamabe) exponent (n-2)/(n+2) for this dimension."""
        return (self.n - 2.0) / (self.n + 2.0)

    @property
    def beta_lower_bound(self) -> float:
        """Critical value m*rho/(n - 2 - m*n); the decay theory needs beta above it.

        Only meaningful when m < (n-2)/n (positive denominator).
        """
        return self.m * self.rho / (self.n - 2.0 - self.m * self.n)

    @property
    def decay_power(self) -> float:
        """Asymptotic log-slope magnitude 2/(1-m) of the profile tail."""
        return 2.0 / (1.0 - self.m)


@dataclass(frozen=True)
class RegimeTag:
    """Outcome of classifying a parameter tuple against the decay hypotheses.

    Classification never fails: invalid regimes are data (theorem_applies is
    False and `reason` says which hypothesis broke), so parameter sweeps can
    map the valid region without try/except.
    """

    theorem_applies: bool
    alpha_vs_nbeta: str  # one of "less", "equal", "greater"
    yamabe_case: bool
    explicit_case: bool
    reason: str | None = None
    existence_advisory: str | None = None


def classify(params: ProblemParams, rel_tol: float = REGIME_REL_TOL) -> RegimeTag:
    """Classify params against the regime hypotheses; never raises.

    theorem_applies is True iff 0 < m < (n-2)/n, rho > 0 and
    beta > m*rho/(n - 2 - m*n).  The measure-zero comparisons (alpha vs
    n*beta, m vs the conformal exponent) use `rel_tol` relative tolerance.
    """
    n, m = params.n, params.m
    alpha = params.alpha
    nbeta = n * params.beta

    if _rel_close(alpha, nbeta, rel_tol):
        alpha_vs_nbeta = "equal"
    elif alpha > nbeta:
        alpha_vs_nbeta = "greater"
    else:
        alpha_vs_nbeta = "less"

    yamabe_case = _rel_close(m, params.m_conformal, rel_tol)
    explicit_case = _rel_close(alpha, nbeta, rel_tol) and _rel_close(
        alpha, (2.0 * params.beta + 1.0) / (1.0 - m), rel_tol
    )

    reason = None
    if not (0.0 < m < params.m_upper):
        reason = (
            f"m={m} outside the fast-diffusion range 0 < m < (n-2)/n = {params.m_upper:.12g}"
        )
    elif not (params.rho > 0.0):
        reason = f"rho={params.rho} is not positive (shrinking regime requires rho > 0)"
    elif not (params.beta > params.beta_lower_bound):
        reason = (
            f"beta={params.beta} is not above the critical value "
            f"m*rho/(n-2-m*n) = {params.beta_lower_bound:.12g}"
        )

    advisory = None
    if reason is not None and params.beta <= 0.0:
        advisory = (
            "existence not guaranteed: for beta <= 0 the profile may vanish at a "
            "finite radius (the exact existence threshold in beta is not known in "
            "general; it equals 0 at the conformal exponent)"
        )

    return RegimeTag(
        theorem_applies=reason is None,
        alpha_vs_nbeta=alpha_vs_nbeta,
        yamabe_case=yamabe_case,
        explicit_case=explicit_case,
        reason=reason,
        existence_advisory=advisory,
    )


def w_infinity(params: ProblemParams) -> float:
    """Closed-form limit of w(r) = r^2 v(r)^(1-m) as r -> infinity.

        w_infinity = 2(n-1)(n(1-m) - 2) / ((1-m)(alpha(1-m) - 2*beta))

    The denominator factor alpha(1-m) - 2*beta equals rho, so this is defined
    exactly when rho > 0.  In the Yamabe case it reduces to (n-1)(n-2)/rho.
    """
    n, m = params.n, params.m
    denom = (1.0 - m) * (params.alpha * (1.0 - m) - 2.0 * params.beta)
    if denom <= 0.0:
        raise ParameterError(
            f"w_infinity undefined: (1-m)*(alpha*(1-m) - 2*beta) = {denom:.6g} <= 0 "
            "(requires rho > 0)"
        )
    return 2.0 * (n - 1.0) * (n * (1.0 - m) - 2.0) / denom


def w_one(params: ProblemParams) -> float:
    """Secondary limit value 2(n-1)/((1-m)*beta); defined only for beta > 0.

    This is the value the subsequential limits of w can take on integrable
    profiles; on the decay-regime profiles treated here the actual limit is
    w_infinity.  Its ordering against w_infinity flips with sign(alpha - n*beta).
    """
    if params.beta <= 0.0:
        raise ParameterError(f"w_one undefined for beta <= 0, got beta={params.beta}")
    return 2.0 * (params.n - 1.0) / ((1.0 - params.m) * params.beta)


@dataclass(frozen=True)
class ClosedFormConstants:
    """Bundle of the closed-form limit values for one parameter tuple."""

    w_inf: float
    w_1: float | None

    def __post_init__(self):
        if not (self.w_inf > 0.0):
            raise ParameterError("w_inf must be positive")


def closed_form_constants(params: ProblemParams) -> ClosedFormConstants:
    w1 = w_one(params) if params.beta > 0.0 else None
    return ClosedFormConstants(w_inf=w_infinity(params), w_1=w1)


def singular_solution_v0(params: ProblemParams, x_norm: float) -> float:
    """Exact power-law solution (w_infinity / |x|^2)^(1/(1-m)) on punctured space.

    Singular at the origin; it is the blow-down limit of every regular profile
    in the decay regime.
    """
    if not (x_norm > 0.0):
        raise DomainError(f"|x| must be positive, got {x_norm}")
    return (w_infinity(params) / (x_norm * x_norm)) ** (1.0 / (1.0 - params.m))


def explicit_solution(
    params: ProblemParams, lam: float, r: float, rel_tol: float = REGIME_REL_TOL
) -> float:
    """Exact regular solution, available only when alpha = n*beta and rho = 1.

        v(r) = ( 2(n-1)(n-2-n*m) / ((1-m)(lam^2 + r^2)) )^(1/(1-m))

    At r = 0 this equals (2(n-1)(n-2-n*m)/((1-m)*lam^2))^(1/(1-m)); the free
    parameter lam > 0 indexes the scaling family.
    """
    tag = classify(params, rel_tol)
    if not tag.explicit_case:
        raise ParameterError(
            "explicit solution requires alpha = n*beta and alpha = (2*beta+1)/(1-m) "
            f"(got alpha={params.alpha:.12g}, n*beta={params.n * params.beta:.12g}, "
            f"rho={params.rho:.12g})"
        )
    if not (lam > 0.0):
        raise ParameterError(f"lam must be positive, got {lam}")
    n, m = params.n, params.m
    num = 2.0 * (n - 1.0) * (n - 2.0 - n * m)
    return (num / ((1.0 - m) * (lam * lam + r * r))) ** (1.0 / (1.0 - m))


def explicit_lambda(params: ProblemParams, rel_tol: float = REGIME_REL_TOL) -> float:
    """The lam value whose explicit solution has initial height eta."""
    tag = classify(params, rel_tol)
    if not tag.explicit_case:
        raise ParameterError("explicit solution family requires alpha = n*beta and rho = 1")
    n, m = params.n, params.m
    num = 2.0 * (n - 1.0) * (n - 2.0 - n * m) / (1.0 - m)
    return math.sqrt(num / params.eta ** (1.0 - m))


def rescale(params: ProblemParams, lam: float) -> ProblemParams:
    """Scaling action v -> lam^(2/(1-m)) v(lam x) on the parameter tuple.

    The equation coefficients are scale invariant; only the initial height
    transforms: eta -> lam^(2/(1-m)) * eta.  Composition satisfies the group
    law rescale(rescale(p, a), b) == rescale(p, a*b).
    """
    if not (lam > 0.0):
        raise ParameterError(f"scaling factor must be positive, got {lam}")
    return replace(params, eta=lam ** (2.0 / (1.0 - params.m)) * params.eta)
