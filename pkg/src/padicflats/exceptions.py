"""Exception hierarchy shared by all padicflats modules."""


class PadicError(ValueError):
    """Base class for every error raised by padicflats."""


class NotPrime(PadicError):
    pass


class NonUnitDenominator(PadicError):
    """A rational whose denominator is divisible by p has no image in Z/p^m."""


class NotSquare(PadicError):
    pass


class SingularAtPrecision(PadicError):
    """The determinant vanishes mod p^m, so the truncation does not fix the Smith exponents."""


class NotInvertible(PadicError):
    pass


class NotAdmissible(PadicError):
    """The degree profile fails the codimension identity."""


class LengthMismatch(PadicError):
    pass


class TooLarge(PadicError):
    """An exhaustive enumeration would exceed the configured guard."""

    def __init__(self, size, guard):
        super().__init__(f"enumeration of {size} items exceeds guard {guard}")
        self.size = size
        self.guard = guard
