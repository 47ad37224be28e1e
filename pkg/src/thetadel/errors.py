"""Exception types shared across the package."""


class ThetaError(Exception):
    """Base class for all errors raised by thetadel."""


class PreconditionError(ThetaError, ValueError):
    """An operation was called on input violating its precondition."""


class BudgetExceeded(ThetaError, RuntimeError):
    """An exact oracle or search was asked to work beyond its configured budget."""
