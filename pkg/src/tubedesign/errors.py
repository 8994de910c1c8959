"""Exception and warning classes."""


class TubeDesignError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensionError(TubeDesignError, ValueError):
    pass


class DegenerateMobiusError(TubeDesignError, ValueError):
    pass


class DomainError(TubeDesignError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class DesignValidationError(TubeDesignError, ValueError):
    pass


class NumericalFailure(TubeDesignError, ArithmeticError):
    """Base class for failures of a numerical procedure (CLI exit status 3)."""


class RepresentationFailure(NumericalFailure):
    """The canonical representation could not be recovered reliably.

    Usually this means the matrix sits numerically on the boundary of the
    moment cone (vanishing mass at infinity or coincident atoms).
    """


class NumericalActionFailure(NumericalFailure):
    pass


class InternalConsistencyFailure(NumericalFailure):
    pass


class ReductionFailure(NumericalFailure):
    """No usable root of the reduction sextic was found."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition or {}


class AccuracyFailure(NumericalFailure):
    """A quadrature or finite-difference estimate did not reach its tolerance.

    Attributes
    ----------
    estimate : float or ndarray
        Best available estimate.
    error : float
        Error bound attached to `estimate`.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class FeasibilityWarning(UserWarning):
    """A threshold equation has no positive root; 0 is returned."""
