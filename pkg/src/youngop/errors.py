"""Exception types raised across the package."""


class YoungOpError(Exception):
    """Base class for all package errors."""


class DimMismatch(YoungOpError, ValueError):
    pass


class DimLimitExceeded(YoungOpError, ValueError):
    pass


class NonConvergence(YoungOpError, ArithmeticError):
    pass


class DomainViolation(YoungOpError, ValueError):
    """A spectrum or argument falls outside a function's domain."""


class NotPositiveDefinite(DomainViolation):
    pass


class NonPositiveInput(YoungOpError, ValueError):
    pass


class InvalidWindow(YoungOpError, ValueError):
    pass


class WindowViolation(YoungOpError, ValueError):
    """The spectrum of the contraction escapes the supplied window."""


class InvalidCondition(YoungOpError, ValueError):
    """Sandwich constants are mis-ordered or not satisfied by the pair."""


class NoWitnessFound(YoungOpError, RuntimeError):
    """The grid found no sign change; the grid may be too coarse."""
