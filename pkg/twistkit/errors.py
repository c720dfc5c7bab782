"""Exception hierarchy shared by every twistkit module."""

from typing import Iterable, Optional


class TwistkitError(ValueError):
    """Base class for invalid inputs to twistkit operations."""


class ChartMismatchError(TwistkitError):
    """Raised when two objects living on different charts are combined."""

    def __init__(self, left: Iterable[str], right: Iterable[str]):
        self.left = tuple(left)
        self.right = tuple(right)
        super().__init__(
            f"Chart mismatch: ({', '.join(self.left)}) vs ({', '.join(self.right)})"
        )


class UnknownCoordinateError(TwistkitError):
    """Raised when an identifier is not a coordinate of the chart."""

    def __init__(self, name: str, chart: Iterable[str]):
        self.name = name
        self.chart = tuple(chart)
        super().__init__(
            f"Unknown coordinate '{name}'. Chart coordinates: {', '.join(self.chart)}"
        )


class DimensionMismatchError(TwistkitError):
    """Raised when a point, state or argument list has the wrong length."""

    def __init__(self, expected: int, actual: int, what: str = "point"):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Expected {what} of length {expected}, got {actual}")


class DegreeError(TwistkitError):
    """Raised when a graded object has the wrong degree or an operation the wrong arity."""


class ParseError(TwistkitError):
    """Raised by the text grammar; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        self.reason = message
        super().__init__(f"{message} (line {line}, column {column})")


class DegenerateFormError(TwistkitError):
    """Raised when a 2-form has identically zero determinant."""


class UnsupportedInversionError(TwistkitError):
    """Raised when inverting a 2-form would need rational-function coefficients."""

    def __init__(self, determinant: str):
        self.determinant = determinant
        super().__init__(
            f"Cannot invert 2-form: determinant {determinant} is not a nonzero constant"
        )


class MagneticFormError(TwistkitError):
    """Raised when a magnetic 2-form has momentum components or momentum dependence."""


class StructureConstantsError(TwistkitError):
    """Raised for invalid structure-constant tables."""


class IntegrationError(RuntimeError):
    """Raised when numerical integration fails or no closed orbit is found."""


class StageFailure(RuntimeError):
    """Raised when a stage of the counterexample chain fails."""

    def __init__(self, stage: str, detail: str, expected: Optional[str] = None,
                 actual: Optional[str] = None):
        self.stage = stage
        self.detail = detail
        self.expected = expected
        self.actual = actual
        super().__init__(f"Stage '{stage}' failed: {detail}")


class ReductionError(RuntimeError):
    """Raised when a density-space computation disagrees with its phase-space counterpart."""
