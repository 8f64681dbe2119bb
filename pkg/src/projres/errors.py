"""Exception types shared across the package."""


class ProjresError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrixError(ProjresError):
    """A linear solve encountered a pivot below tolerance."""


class NotPositiveDefiniteError(SingularMatrixError):
    """Cholesky factorization hit a nonpositive pivot (matrix not SPD)."""


class ConvergenceError(ProjresError):
    """An iterative kernel failed to converge within its sweep limit."""


class DegenerateDeletionError(ProjresError):
    """Deleting the requested points removes all information along some
    direction, so leave-k-out predictions are undefined."""


class DataFormatError(ProjresError):
    """Malformed input data (CSV row, corpus record, feature table)."""
