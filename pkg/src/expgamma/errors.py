"""Exception hierarchy shared by all modules."""


class ExpGammaError(Exception):
    """Base class for library errors."""


class DomainError(ExpGammaError, ValueError):
    """Argument outside the function's domain."""


class UnsupportedOrderError(ExpGammaError, ValueError):
    """Derivative / index order above the supported cap."""


class ConvergenceError(ExpGammaError, ArithmeticError):
    """A series or product did not reach tolerance within its term cap."""


class PreconditionError(ExpGammaError, ValueError):
    """Parameters violate an operation's stated precondition."""


class NoBracketError(ExpGammaError, ArithmeticError):
    """No sign change found in the search window."""


class RegimeMismatchError(ExpGammaError, ArithmeticError):
    """Root count disagrees with the proven classification.

    ``witnesses`` holds the offending abscissae / values for diagnosis.
    """

    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = list(witnesses)


class EvaluationError(ExpGammaError, ArithmeticError):
    """A user function failed (raised or returned NaN) at a given point."""


class InputError(DomainError):
    """Malformed spec input; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
