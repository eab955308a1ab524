"""Shared exception and warning types."""


class NumericalError(RuntimeError):
    """A computation lost more accuracy than its contract allows."""


class NearSingularError(NumericalError):
    """A truncated operator block is too close to singular to solve at r=1."""

    def __init__(self, message, sigma_max):
        super().__init__(message)
        self.sigma_max = sigma_max


class RegularityError(RuntimeError):
    """An operation that requires the one-to-one (regular) regime was asked
    to run outside it."""


class ConditioningWarning(UserWarning):
    """A weight came close enough to zero that logarithms were clamped;
    results near the clamped nodes carry reduced accuracy."""
