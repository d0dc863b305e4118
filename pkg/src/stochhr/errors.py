"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class HorizonError(DomainError):
    """A time lies outside the stored horizon of a Wiener path.

    Raised instead of extrapolating; the caller should resample the path
    with a wider horizon.
    """


class NumericalError(RuntimeError):
    """A numerical procedure failed (solver non-convergence, overflow)."""

    def __init__(self, message, t=None, **diagnostics):
        super().__init__(message)
        self.t = t
        self.diagnostics = diagnostics


class BlowUpError(NumericalError):
    """A non-finite value appeared while time stepping."""


class ConfigError(ValueError):
    """Invalid run configuration."""
