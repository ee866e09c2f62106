"""Exception hierarchy shared by every regpart module."""


class RegpartError(Exception):
    """Base class for all errors raised by regpart."""


class RingMismatch(RegpartError, TypeError):
    pass


class IncompatibleOffsets(RegpartError, ValueError):
    """Two series whose exponents differ by a non-integer amount were combined."""


class NonIntegralExponents(RegpartError, ValueError):
    pass


class NonUnitLeadingCoefficient(RegpartError, ZeroDivisionError):
    pass


class DenominatorNotCoprime(RegpartError, ValueError):
    """A rational coefficient is not l-integral, so it has no residue mod l^m."""


class InvalidModulus(RegpartError, ValueError):
    pass


class EmptyInput(RegpartError, ValueError):
    pass


class DimensionMismatch(RegpartError, ValueError):
    pass


class NotInSpan(RegpartError, LookupError):
    pass


class NonUnit(RegpartError, ZeroDivisionError):
    pass


class NotPrime(RegpartError, ValueError):
    pass


class PrimeTooSmall(RegpartError, ValueError):
    pass


class InsufficientPrecision(RegpartError):
    """The available (or plannable) window is too short for the request.

    ``required`` names the window the caller would need, when known.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class NoMatch(RegpartError):
    """A q-series is definitively not congruent to any form in the searched space."""

    def __init__(self, message, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class NotFoundBelow(RegpartError, LookupError):
    def __init__(self, k_max):
        super().__init__(f"no level-1 weight <= {k_max} in the requested class")
        self.k_max = k_max


class RankObstruction(RegpartError):
    """No scalar relation links the two requested series on the window."""


class NonUnitRatio(RegpartError):
    pass


class ComputationCapExceeded(RegpartError):
    pass


class Cancelled(RegpartError):
    pass
