"""ydecay: radial profiles of self-similar fast diffusion and Yamabe solitons.

Solves the singular radial IVP for profiles v of

    (n-1)/m * Laplacian(v^m) + alpha v + beta x . grad v = 0,  v > 0,

with alpha = (2 beta + rho)/(1 - m), and verifies at desk scale the decay
limit of w(r) = r^2 v^(1-m), the log-slope limit, closed-form envelopes,
curvature limits of the associated conformal metric, and the self-similar
reduction of the fast diffusion equation.
"""

from ._stepper import available_backends, backend_name, set_backend
from .asymptotics import (
    DecayEstimate,
    decay_estimate,
    rescaling_convergence,
    subsequence_value_check,
)
from .exceptions import (
    CurveRangeError,
    CurveTooShortError,
    DomainError,
    GridFileError,
    LadderError,
    NotYamabeError,
    ParameterError,
    PositivityError,
    PositivityLossError,
    StepSizeUnderflowError,
    YdecayError,
)
from .geometry import GeometrySample, curvature_limits, scalar_curvature, sectional_curvatures
from .model import (
    ClosedFormConstants,
    ProblemParams,
    RegimeTag,
    classify,
    closed_form_constants,
    derive_alpha,
    explicit_solution,
    rescale,
    singular_solution_v0,
    w_infinity,
    w_one,
)
from .profiles import AnalyticProfile, explicit_profile, singular_profile
from .selfsimilar import SelfSimilarSolution, evaluate_u, pde_residual
from .solver import (
    BoundReport,
    RadialState,
    SolutionCurve,
    bound_check,
    integral_identity_residual,
    integrate,
    ode_residual,
    rhs,
    series_origin,
)
from .sweep import SweepRecord, parse_grid_file, run_sweep

__version__ = "0.1.0"
