"""Exception types shared across the package."""


class QencostError(Exception):
    """Base class for all package errors."""


class IndexOutOfRange(QencostError, IndexError):
    pass


class TooManyQubits(QencostError):
    pass


class ResetOnSuperposedQubit(QencostError):
    pass


class NonClassicalGateOnBranch(QencostError):
    pass


class UnnormalizedTarget(QencostError, ValueError):
    pass


class NotPowerOfTwo(QencostError, ValueError):
    pass


class DomainError(QencostError, ValueError):
    pass


class BudgetExceeded(QencostError):
    pass


class DegenerateData(QencostError, ValueError):
    pass


class TooLarge(QencostError):
    pass


class NonFiniteValue(QencostError, ValueError):
    pass


class WidthMismatch(QencostError, ValueError):
    pass


class ValueOutOfRange(QencostError, ValueError):
    pass


class StaleDataRegion(QencostError):
    pass


class AncillaExhausted(QencostError):
    pass
