"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation (e.g. k <= 0)."""


class ConfigurationError(ValueError):
    """A potential profile or run configuration is inconsistent."""


class SingularMatrixError(ArithmeticError):
    """A matching or transfer matrix cannot be inverted."""


class NumericalConsistencyError(ArithmeticError):
    """A numerical self-check failed (imaginary residue, norm growth, ...)."""


class DegenerateNormalizationError(ArithmeticError):
    """Operator normalization requested for a non-positive absorption kernel."""
