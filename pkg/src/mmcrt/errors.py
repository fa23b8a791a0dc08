"""Exception taxonomy shared across the package.

Validation failures (bad files, bad configs, contract violations) map to
CLI exit code 1 and HTTP 400; numerical failures (non-finite intermediates,
non-convergence) map to exit code 2 and HTTP 500.
"""


class MmcrtError(Exception):
    """Base class for all package errors."""


class InputValidationError(MmcrtError):
    """Invalid input: file format, dimensions, or configuration."""


class NumericalError(MmcrtError):
    """Numerical failure: non-finite values, degeneracy, non-convergence."""
