"""Exception types raised across the package."""


class AoicovError(Exception):
    """Base class for all package errors."""


class DomainError(AoicovError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ValidationError(AoicovError, ValueError):
    """A parameter bundle violates one of its invariants."""


class InfeasibleError(AoicovError, ValueError):
    """The coverage constraint cannot be met.

    ``parameter`` names the setting that makes the constraint unattainable.
    """

    def __init__(self, message, parameter=None):
        super().__init__(message)
        self.parameter = parameter


class ConsistencyError(AoicovError, RuntimeError):
    """An internal structural guarantee was violated (e.g. odd root count)."""


class ConfigError(AoicovError, ValueError):
    """A configuration file could not be parsed or validated."""

    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
