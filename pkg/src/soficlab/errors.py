"""Exception types shared across the library."""


class SoficLabError(Exception):
    """Base class for library errors."""


class ArgumentError(SoficLabError, ValueError):
    """A caller violated a documented precondition."""


class UnsupportedOperationError(SoficLabError):
    """The operation is not defined for this kind of object (e.g. Folner
    sets of a free group, Markov measures on non-interval windows)."""


class ResourceBudgetError(SoficLabError):
    """An exact search exceeded its node budget.

    Carries whatever partial result was available so callers can degrade
    gracefully instead of crashing mid-experiment.
    """

    def __init__(self, message, partial=None, upper_bound=None, dp_prunable=False):
        super().__init__(message)
        self.partial = partial
        self.upper_bound = upper_bound
        self.dp_prunable = dp_prunable


class SpecError(SoficLabError):
    """An experiment spec file failed schema or cross-reference validation."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
