"""Exception types shared across the package."""


class DBarrierError(Exception):
    """Base class for all package errors."""


class DomainError(DBarrierError, ValueError):
    """Input outside the domain of an operation (E <= 0, non-positive mass, ...)."""


class SingularKinematicsError(DBarrierError, ArithmeticError):
    """E equals a real barrier height exactly, so delta is undefined."""


class SingularInputError(DBarrierError, ArithmeticError):
    """A closed-form expression hits a zero denominator."""


class Divergence(DBarrierError, ArithmeticError):
    """The transmission denominator D vanishes (transmission singularity).

    Carries the context needed to report the pole: the energy, the value of
    D that triggered it and the structure being evaluated.
    """

    def __init__(self, message, *, E=None, D=None, structure=None):
        super().__init__(message)
        self.E = E
        self.D = D
        self.structure = structure


class SolverError(DBarrierError, RuntimeError):
    """A root refinement failed to converge; ``bracket`` holds the last interval."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class NotFoundError(DBarrierError, LookupError):
    """No singular point / root exists in the requested branch or range."""


class TransferOverflowError(DBarrierError, ArithmeticError):
    """Transfer-matrix composition produced non-finite entries."""
