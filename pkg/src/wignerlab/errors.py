"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes, so library code should raise
the most specific class that applies instead of bare ValueError.
"""


class WignerlabError(Exception):
    """Base class for all package errors."""


class DomainError(WignerlabError, ValueError):
    """Arguments outside the mathematical domain of an operation.

    Examples: H outside its admissible interval, D >= 1/q in the
    non-central regime, a covariance table that is not a correlation.
    """


class SizeError(WignerlabError, ValueError):
    """Requested computation exceeds a size or term budget."""


class AccuracyError(WignerlabError, RuntimeError):
    """A numerical routine could not reach its accuracy target.

    Carries the achieved bound in ``achieved`` when known.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
