"""Exception types shared across the package."""


class FoliationError(Exception):
    """Base class for all errors raised by foliation_lab."""


class NumericOverflowError(FoliationError, ArithmeticError):
    """A trajectory produced a non-finite value.

    ``step`` is the index of the first offending one-step evolution and
    ``time`` the corresponding time (``step * sample_step``).
    """

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class InvalidTraceError(FoliationError, ValueError):
    pass


class InvalidSystemError(FoliationError, ValueError):
    pass


class InvalidLiftError(InvalidSystemError):
    pass


class TuningError(FoliationError, RuntimeError):
    pass


class NotApplicableError(FoliationError, ValueError):
    """Preconditions of an estimator are not certified for the given input."""


class WindowExceededError(FoliationError, ValueError):
    """A query reached outside the finite window of a Delone segment."""


class DisplacementSignError(FoliationError, ValueError):
    pass


class InvalidSeedError(FoliationError, ValueError):
    pass


class BlowUpError(NumericOverflowError):
    pass


class ConfigError(FoliationError, ValueError):
    pass
