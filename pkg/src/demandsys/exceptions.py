"""Exception hierarchy.

Two broad families matter for the CLI exit-code contract: data/format
problems (exit 2) and numerical/convergence problems (exit 3). Everything
derives from :class:`DemandSystemError` so callers can catch one base.
"""

from __future__ import annotations


class DemandSystemError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(DemandSystemError):
    """Input file cannot be parsed into the expected layout (missing or
    unmappable columns, malformed CSV)."""


class DataError(DemandSystemError):
    """Input parses but violates a data invariant (non-positive price,
    duplicate observation, unbalanced panel, zero-variance series)."""


class InsufficientDataError(DataError):
    """Too few observations for the requested statistic or fit."""


class DimensionError(DemandSystemError):
    """Array arguments have inconsistent shapes."""


class SpecificationError(DemandSystemError):
    """Model configuration is internally inconsistent (e.g. a quadratic
    shifter without stage-1 aggregator coefficients, non-nested LR test)."""


class NumericalError(DemandSystemError):
    """A linear-algebra step failed (singular covariance, rank-deficient
    normal equations). Carries an optional condition diagnostic."""

    def __init__(self, message: str, condition: float | None = None):
        if condition is not None:
            message = f"{message} (condition number {condition:.3e})"
        super().__init__(message)
        self.condition = condition


class IdentificationError(NumericalError):
    """Restricted normal equations are rank deficient: some coefficient is
    not identified by the data."""


class ConvergenceError(NumericalError):
    """An iterative fit hit its iteration cap before meeting tolerance.

    ``trace`` holds the per-iteration max coefficient deltas; ``partial``
    holds the last iterate (flagged non-converged) when the caller can use
    a provisional result.
    """

    def __init__(self, message: str, trace=None, partial=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []
        self.partial = partial


class GenerationError(DemandSystemError):
    """Synthetic-data generation could not produce valid shares within the
    retry bound."""
