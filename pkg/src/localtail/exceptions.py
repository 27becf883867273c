"""Exception types raised across the package."""


class ArgumentError(ValueError):
    """An argument is outside the documented domain of an operation."""


class DomainError(ArgumentError):
    """A bound was requested outside the range where it is asserted."""

    def __init__(self, message, threshold=None):
        super().__init__(message)
        self.threshold = threshold


class UndefinedBoundError(ArgumentError):
    """The requested bound has a zero denominator."""


class NumericIntegrityError(ArithmeticError):
    """A numerical self-check failed (imaginary residue, duality gap, ...)."""


class CapacityError(RuntimeError):
    """Full enumeration would exceed the configured point budget."""
