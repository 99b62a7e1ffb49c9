"""Exception types raised across the package."""


class OscboundError(ValueError):
    """Base class for all domain errors."""


class InvalidParameterError(OscboundError):
    pass


class InvalidIntervalError(OscboundError):
    pass


class InsufficientDataError(OscboundError):
    pass


class OutOfRangeError(OscboundError):
    """A temperature fell outside the oscillator's operating range."""

    def __init__(self, message: str, *, limit: str, value: float, time: float | None = None):
        super().__init__(message)
        self.limit = limit
        self.value = value
        self.time = time


class FitValidationError(OscboundError):
    """An aging fit rose above the prudential aging bound."""

    def __init__(self, message: str, *, crossing_time: float):
        super().__init__(message)
        self.crossing_time = crossing_time


class ScenarioError(OscboundError):
    pass


class SpecParseError(OscboundError):
    """Spec-file syntax or validation failure, tagged with its 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.reason = message
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
