"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operand shapes are incompatible (or a dimension is zero)."""


class SingularOperationError(ArithmeticError):
    """Scalar division by zero."""


class SingularPivotError(ArithmeticError):
    """A zero pivot was met during pivot-free elimination.

    ``index`` is the 1-based position of the offending pivot.
    """

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"zero pivot at index {index}")


class UndefinedMetricError(ValueError):
    """Relative error requested against a zero reference."""


class HexFloatParseError(ValueError):
    """Malformed hexadecimal floating-point literal.

    ``position`` is the 0-based offset of the first offending character.
    """

    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(f"{reason} at position {position} in {text!r}")
