"""Exception types shared across the toolkit."""


class SubarchError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(SubarchError):
    """Invalid configuration: bad search space, architecture, or option values."""


class DataError(SubarchError):
    """Invalid or missing input data: measurement records, token files, metric lookups."""


class VerificationError(SubarchError):
    """A cross-module consistency check found a counterexample."""
