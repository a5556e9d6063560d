"""Exception types shared across the package."""


class ChemoBlowError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ChemoBlowError):
    """A parameter violates its documented domain; the message names the inequality."""


class GridMismatchError(ChemoBlowError):
    """Two fields (or a field and an operator) live on different grids."""


class DensityViolationError(ChemoBlowError):
    """A field that must be a nonnegative density carries negative values."""


class CompatibilityError(ChemoBlowError):
    """The elliptic problem is unsolvable: mu is not the volume mean of u."""


class NumericalFailureError(ChemoBlowError):
    """A non-finite value appeared during flux assembly."""

    def __init__(self, message, cell_index=None):
        super().__init__(message)
        self.cell_index = cell_index


class BlowupSuspected(ChemoBlowError):
    """Time step underflowed dt_min; the run cannot be continued.

    Raised as a signal, not a crash: the driver converts it into a
    StepFailure verdict at the time it occurred.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConfigError(ChemoBlowError):
    """Configuration file is malformed or references missing resources."""
