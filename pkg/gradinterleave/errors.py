"""
Exception hierarchy shared by every module of the package.
The CLI maps each class to a distinct process exit code.
"""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIGURATION = 3
EXIT_CHECK_FAILURE = 4


class GradInterleaveError(Exception):
    """
    Base class for all errors raised by the package.
    """
    exit_code = EXIT_CONFIGURATION


class DimensionError(GradInterleaveError):
    """
    Raised when matrix or layer dimensions are zero or mutually inconsistent.
    """


class ConfigurationError(GradInterleaveError):
    """
    Raised for invalid combinations of modes, step kinds, presets or limits.
    """


class CheckFailure(GradInterleaveError):
    """
    Raised when a simulated result disagrees with the golden reference.
    """
    exit_code = EXIT_CHECK_FAILURE
