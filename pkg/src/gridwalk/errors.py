"""Exception types shared across the package.

The three base classes mirror the failure categories the CLI maps to exit
codes: configuration/input problems, violated structural invariants, and
numerical tolerances that were not met.
"""


class GridwalkError(Exception):
    """Base class for all package errors."""


class ConfigError(GridwalkError):
    """Bad configuration, unparseable input document, or missing file."""


class GraphParseError(ConfigError):
    """Malformed graph document; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantViolation(GridwalkError):
    """A structural invariant of a value was violated."""


class ProtocolIncompleteError(InvariantViolation):
    """Register sites carry amplitude where the protocol requires them empty."""


class ShiftOutOfRangeError(InvariantViolation):
    """A register shift would move amplitude outside the physical grid."""


class ToleranceFailure(GridwalkError):
    """A numerical tolerance was exceeded."""


class UnitarityError(ToleranceFailure):
    """Matrix expected to be unitary fails the unitarity check."""


class SpectralBoundsError(ToleranceFailure):
    """Chebyshev propagation detected spectrum outside the supplied bounds."""


class CalibrationUnreachableError(ToleranceFailure):
    """Requested transfer probability is not reached over a full oscillation."""

    def __init__(self, message: str, max_achieved: float):
        self.max_achieved = max_achieved
        super().__init__(message)
