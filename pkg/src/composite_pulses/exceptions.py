class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class BracketError(DomainError):
    """A root bracket does not contain a sign change."""

    def __init__(self, message, lo_value, hi_value):
        super().__init__(message)
        self.lo_value = lo_value
        self.hi_value = hi_value


class ConditioningError(ArithmeticError):
    """A numerical fit could not reach its residual target."""
