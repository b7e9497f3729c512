"""Exception hierarchy shared by all modules."""


class CyclicityError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(CyclicityError, ValueError):
    """An argument violates a documented precondition."""


class StabilityError(CyclicityError):
    """The friction matrix is not (safely) stable."""


class NumericalError(CyclicityError, ArithmeticError):
    """A computation produced a result that cannot be trusted."""


class SingularCovarianceError(NumericalError):
    """The stationary covariance is singular where an inverse is needed."""


class DegeneracyError(NumericalError):
    """A spectral quantity is not simple, or vectors are collinear."""


class StepSizeError(CyclicityError):
    """The Euler-Maruyama step is outside the forward-Euler stability region."""
