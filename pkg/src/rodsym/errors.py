"""Exception types shared across the package."""


class RodsymError(Exception):
    """Base class for all rodsym errors."""


class DomainError(RodsymError, ValueError):
    """An argument lies outside the function's domain."""


class ParameterError(RodsymError, ValueError):
    """A parameter violates its documented range or shape."""


class PreconditionError(RodsymError, ValueError):
    """Input data violates a mathematical precondition."""


class CompatibilityError(PreconditionError):
    """Source data whose integral is required to vanish but does not."""


class InternalError(RodsymError, RuntimeError):
    """A self-check that should hold unconditionally failed."""
