"""Exception hierarchy shared by all densecell modules."""


class DensecellError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DensecellError, ValueError):
    """An argument lies outside the domain of the operation."""


class DivergenceError(DensecellError, ArithmeticError):
    """A quadrature or search did not converge.

    ``partial`` carries the best value available when the routine gave up.
    """

    def __init__(self, message, partial=float("nan")):
        super().__init__(message)
        self.partial = partial


class InvalidWitnessError(DensecellError, ValueError):
    """An Assumption-1 witness function is not decreasing."""


class NoCoverageError(DensecellError):
    """A network realization has no base station to serve the origin."""


class DegenerateDenominatorError(DensecellError, ZeroDivisionError):
    """Interference plus noise is exactly zero."""


class EstimationError(DensecellError, RuntimeError):
    """Every trial at some density was censored."""


class ConfigError(DensecellError, ValueError):
    """A configuration document is malformed."""
