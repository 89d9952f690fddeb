"""Exception hierarchy for the ring-exchange ladder toolkit.

Every failure the package raises deliberately derives from LadderError, so
callers can catch one base type.  The CLI maps subtypes to exit codes.
"""


class LadderError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LadderError, ValueError):
    """An argument is outside the supported domain (bad L, unknown bond, ...)."""


class CapacityError(LadderError):
    """The requested system size exceeds what the index types can address."""


class PreconditionError(LadderError, ValueError):
    """An input object violates a documented precondition (non-hermitian matrix,
    trace != 1, negative eigenvalue beyond tolerance, ...)."""


class XFormViolationError(PreconditionError):
    """A density matrix strays from the X sparsity pattern beyond tolerance."""

    def __init__(self, magnitude, tol, message=None):
        self.magnitude = float(magnitude)
        self.tol = float(tol)
        if message is None:
            message = (
                "off-pattern matrix element magnitude %.3e exceeds tolerance %.3e"
                % (self.magnitude, self.tol)
            )
        super().__init__(message)


class ConvergenceError(LadderError):
    """The iterative eigensolver failed to reach the requested residual."""

    def __init__(self, message, residual=None):
        self.residual = None if residual is None else float(residual)
        super().__init__(message)


class CellLookupError(LadderError, KeyError):
    """A sweep-table lookup addressed a (theta, L, bond, level) cell that is absent."""


class CoverageError(LadderError):
    """A detector was asked to scan a region the sweep table does not cover."""


class ValidationError(LadderError):
    """An embedded self-check (oracle cross-validation) failed."""
