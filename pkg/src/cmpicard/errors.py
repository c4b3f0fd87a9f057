from .kernel.groups import ResourceError


class DomainError(ValueError):
    pass


class NotCMError(DomainError):
    pass


class UnsupportedBaseError(DomainError):
    pass


class UnsupportedCaseError(DomainError):
    pass


class NotInGPrimeError(DomainError):
    """Determinant outside Q_p^*."""


class InvalidComplexStructureError(DomainError):
    pass


class PrecisionError(ArithmeticError):
    pass


__all__ = ["DomainError", "NotCMError", "UnsupportedBaseError", "UnsupportedCaseError", "NotInGPrimeError",
           "InvalidComplexStructureError", "PrecisionError", "ResourceError",
           "InconsistencyError"]


class InconsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""
