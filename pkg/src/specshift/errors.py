"""Exception types raised by :mod:`specshift`."""


class SpecShiftError(Exception):
    """Base class for all library errors."""


class DomainError(SpecShiftError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleCollisionError(DomainError):
    """A rational test function has a pole at (or too close to) a node."""


class DegenerateSplineError(DomainError):
    """A basic spline was requested over nodes that all coincide."""


class CapacityError(SpecShiftError):
    """The multilinear measure would exceed the configured atom budget."""


class SymmetryViolationError(SpecShiftError):
    """A quantity that must be real by symmetry has a large imaginary part.

    This signals a broken spectral decomposition upstream rather than a
    problem with the caller's input.
    """


class EigensolverError(SpecShiftError):
    """The Hermitian eigensolver failed to converge."""

    def __init__(self, dim, iterations=None, detail=""):
        self.dim = dim
        self.iterations = iterations
        msg = f"eigensolver did not converge (dim={dim}, iterations={iterations})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
