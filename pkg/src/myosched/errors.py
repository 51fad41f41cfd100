"""Exception types shared across the package."""


class MyoschedError(Exception):
    """Base class for all errors raised by myosched."""


class WorkloadFormatError(MyoschedError):
    """A workload or config file could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class InvariantViolation(MyoschedError):
    """A data value breaks one of its declared invariants."""


class ConfigurationError(MyoschedError):
    """A run was configured inconsistently (bad window size, unknown resource, ...)."""


class SchedulingLogicError(MyoschedError):
    """Internal precondition breach; indicates a bug, not bad input."""
