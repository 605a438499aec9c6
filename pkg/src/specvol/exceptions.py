"""Exception hierarchy shared by all pipeline stages."""


class SpecvolError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(SpecvolError, ValueError):
    """Bad or inconsistent configuration (study windows, synth parameters)."""


class DataError(SpecvolError, ValueError):
    """Input data that cannot be used as-is."""


class ParseError(DataError):
    """A malformed line in a tick or calendar file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(DataError):
    """A well-formed record that violates a domain invariant."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoPriceYet(DataError, LookupError):
    """No trade at or before the requested intraday offset."""

    def __init__(self, offset):
        self.offset = offset
        super().__init__(f"no trade at or before offset {offset}s")


class UndefinedAggregateError(DataError):
    """A period aggregate was requested over zero accepted days."""


class DegenerateError(DataError):
    """A change rate is undefined because an aggregate is zero."""


class InsufficientSampleError(DataError):
    """Fewer than two contributing stocks for a cross-sectional statistic."""
