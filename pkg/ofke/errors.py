"""
Exception hierarchy for the ofke package.

Violated preconditions and malformed inputs raise; scientific outcomes such as
bound violations or decomposition residuals are returned as report data.
"""


class OfkeError(Exception):
    """Base class for every error raised by ofke."""


class DomainError(OfkeError, ValueError):
    """An argument lies outside the domain of an operation."""


class UsageError(OfkeError, ValueError):
    """Objects were combined incorrectly, e.g. a field evaluated on a foreign grid."""


class DensityFileError(OfkeError, ValueError):
    """A density file could not be read, parsed or validated."""


class ConvergenceError(OfkeError, RuntimeError):
    """An iterative solve did not converge and the caller asked for strict handling."""
