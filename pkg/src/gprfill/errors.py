"""Exception types shared across the package.

All errors raised by gprfill derive from :class:`GprFillError`, so the
service layer can map them to a single HTTP error class.
"""


class GprFillError(Exception):
    """Base class for all gprfill errors."""


class DimensionError(GprFillError, ValueError):
    """Grid dimensions are invalid or inconsistent with the data."""


class EmptySampleError(GprFillError, ValueError):
    """An operation requires observed sites and none (or too few) exist."""


class DegenerateRangeError(GprFillError, ValueError):
    """The observed sample has zero value range; the angle map is undefined."""


class AngleRangeError(GprFillError, ValueError):
    """A spin angle lies outside [0, 2*pi] beyond tolerance."""


class ConfigurationError(GprFillError, ValueError):
    """Model or run configuration is inconsistent (e.g. bias mode without a bias field)."""


class DomainError(GprFillError, ValueError):
    """Input values fall outside an operation's mathematical domain."""


class CsvFormatError(GprFillError, ValueError):
    """A CSV input could not be parsed; message names file, row and column."""
