"""Exception hierarchy."""


class SteinError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SteinError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(DomainError):
    """Invalid distribution parameters.

    ``code`` is a stable machine-readable identifier such as
    ``"gig.a_nonpositive"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{message} [{code}]")
        self.code = code


class PreconditionError(SteinError):
    """A theorem hypothesis required by the operation does not hold."""


class RootBracketError(DomainError):
    """The bracket handed to the root finder has no sign change."""


class ConvergenceError(SteinError, ArithmeticError):
    """A numerical procedure did not reach its tolerance."""


class NumericalError(SteinError, ArithmeticError):
    """NaN or overflow detected in a computed quantity."""
