"""Exception types shared across modules."""


class PrecisionExhausted(ArithmeticError):
    """Working precision is too low to decide a comparison or bound an error."""


class PreconditionError(ValueError):
    """An input lies outside the range where a bound or algorithm applies.

    ``inequality`` names the violated condition in plain text.
    """

    def __init__(self, message: str, inequality: str = ""):
        super().__init__(message)
        self.inequality = inequality


class CapTooSmall(RuntimeError):
    """An enumeration cap is below what exhaustive search needs."""
