"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A parameter or configuration value violates a model invariant."""


class DomainError(ValueError):
    """A transform was requested outside the region where it converges."""


class NumericalIntegrityError(ArithmeticError):
    """A computed probability drifted outside [0, 1] beyond round-off."""
