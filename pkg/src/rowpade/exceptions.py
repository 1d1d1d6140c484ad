"""Exception hierarchy.

UsageError marks malformed inputs (bad specs, out-of-range parameters);
the CLI maps it to exit code 2.  NumericError marks failures of the
numeric machinery itself (exit code 3).
"""


class RowPadeError(Exception):
    pass


class UsageError(RowPadeError):
    """Invalid argument, spec document, or parameter combination."""


class MixedModeError(UsageError):
    """Operands carry different arithmetic modes."""


class NumericError(RowPadeError):
    """A numeric computation could not be completed."""


class ExactValueNeeded(NumericError):
    """An operation required the exact value of a tagged constant."""


class RootFindingError(NumericError):
    """Root refinement did not converge; best iterates are attached."""

    def __init__(self, message, iterates=None, residuals=None):
        super().__init__(message)
        self.iterates = iterates or []
        self.residuals = residuals or []


class UncertainCancellation(NumericError):
    """Float-mode common-factor division left a residual above tolerance."""


class TelescopingError(NumericError):
    """Low-order coefficients of a telescoping difference failed to vanish."""


class InsufficientData(NumericError):
    """Not enough usable terms to fit a rate or radius."""


class EmptyCompactError(NumericError):
    """Every sample point of a compact was removed by the exclusion disks."""


class EvaluationDomainError(NumericError):
    """A series cannot be evaluated reliably at the requested point."""
