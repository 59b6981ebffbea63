"""Exception hierarchy shared by all ydecay modules."""


class YdecayError(Exception):
    """Base class for all package errors."""


class ParameterError(YdecayError, ValueError):
    """A parameter or flag violates a hard constraint of the problem."""


class DomainError(YdecayError, ValueError):
    """A coordinate argument is outside its mathematical domain (e.g. r <= 0)."""


class PositivityError(YdecayError):
    """The profile value v (or v^m) is non-positive where positivity is required."""


class PositivityLossError(PositivityError):
    """Integration hit v^m <= 0 at finite radius.

    Carries the partial curve accumulated up to the last positive sample.
    """

    def __init__(self, message, curve=None, r_last=None):
        super().__init__(message)
        self.curve = curve
        self.r_last = r_last


class StepSizeUnderflowError(YdecayError):
    """The adaptive integrator could not meet the tolerance with a finite step.

    Carries the partial curve accumulated up to the last accepted sample.
    """

    def __init__(self, message, curve=None, r_last=None):
        super().__init__(message)
        self.curve = curve
        self.r_last = r_last


class CurveRangeError(YdecayError, ValueError):
    """A query radius lies outside the range covered by the curve."""


class NotYamabeError(YdecayError, ValueError):
    """A curvature operation was requested outside the conformal exponent m = (n-2)/(n+2)."""


class LadderError(YdecayError, ValueError):
    """A sampling ladder does not fit inside the curve range."""


class CurveTooShortError(LadderError):
    """The curve does not extend far enough for the requested rescaling check."""


class GridFileError(YdecayError, ValueError):
    """A sweep grid file is missing, unreadable, or malformed."""
