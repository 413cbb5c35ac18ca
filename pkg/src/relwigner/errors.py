"""Exceptions shared across the package."""


class ConfigError(ValueError):
    """Invalid scenario configuration (CLI exit code 2)."""


class NumericalAbort(RuntimeError):
    """A solver detected a non-recoverable numerical failure (CLI exit code 3)."""
