"""Exception types shared across the pipeline.

ConfigError maps to exit code 1, DataError to exit code 2.
"""


class MosaicError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(MosaicError):
    """Invalid configuration value, flag, or registry override."""


class DataError(MosaicError):
    """Unreadable, malformed, or empty input data."""
