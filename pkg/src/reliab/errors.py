"""Exception hierarchy shared by all reliab modules.

The CLI maps these onto process exit codes: ConfigurationError -> 2,
DataError (and subclasses) -> 3, DomainError / NumericError -> 4.
"""


class ReliabError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(ReliabError, ValueError):
    """Invalid configuration: bad alpha/epsilon/k, malformed flags, bad grids."""


class DataError(ReliabError, ValueError):
    """Problems with user-supplied data."""


class IngestionError(DataError):
    """A data file could not be parsed; message carries line context."""


class InsufficientDataError(DataError):
    """Fewer observations than the operation requires."""


class DegenerateSampleError(DataError):
    """Sample variance is zero; studentized statistics are undefined."""


class DomainError(ReliabError, ValueError):
    """Argument outside the mathematical domain of a kernel function."""


class NumericError(ReliabError, ArithmeticError):
    """Internal numeric failure (non-finite intermediate, lost precision)."""
