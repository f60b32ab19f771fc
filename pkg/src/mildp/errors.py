"""Exception types shared by all modules."""


class MildError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(MildError, ValueError):
    """Arguments violate a documented precondition."""


class ResourceLimitError(MildError):
    """A configured size or degree cap would be exceeded."""


class NotInIdealError(InvalidInputError):
    """A Lie element has a component outside the ideal it was claimed to lie in."""


class NoValidFactorizationError(MildError, ArithmeticError):
    """A power series has no product expansion with nonnegative exponents."""

    def __init__(self, degree: int, exponent: int):
        self.degree = degree
        self.exponent = exponent
        super().__init__(f"exponent g_{degree} = {exponent} is negative")


class FormulaInconsistencyError(MildError, AssertionError):
    """Two independent computations of the same quantity disagree."""
