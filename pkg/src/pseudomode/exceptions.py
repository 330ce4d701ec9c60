"""Exception hierarchy.

Validation problems derive from :class:`ValueError` so callers that only care
about bad input can catch that; numerical breakdowns derive from
:class:`NumericalError`.
"""


class PseudomodeError(Exception):
    """Base class for all package errors."""


class ValidationError(PseudomodeError, ValueError):
    """Malformed or inconsistent input."""


class ChannelUndefinedError(ValidationError):
    """The requested source state has no partner in the active channel."""


class EmptySectorError(ValidationError):
    """Conserved charges do not describe any Fock state (or too many)."""


class NumericalError(PseudomodeError, ArithmeticError):
    """A computation broke down numerically."""


class PoleProximityError(NumericalError):
    """Evaluation point sits on (or numerically at) a pole.

    ``depth`` is the recursion depth at which the vanishing denominator
    appeared, or ``None`` when not applicable.
    """

    def __init__(self, message, depth=None):
        super().__init__(message)
        self.depth = depth


class InstabilityError(NumericalError):
    """Time stepping blew up; retry with a smaller step."""


class ConvergenceError(NumericalError):
    """An iteration did not converge. ``residuals`` holds diagnostics."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class IllPosedFitError(NumericalError):
    """Rational fit is underdetermined or rank deficient."""


class DivergenceError(NumericalError):
    """A closed-form quantity is infinite for the given parameters."""
