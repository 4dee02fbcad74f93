"""Exception types shared across the package."""


class ProtmeasError(Exception):
    """Base class for all package-specific failures."""


class TruncationError(ProtmeasError):
    """A requested object does not fit on the truncated basis."""


class NumericalError(ProtmeasError):
    """A numerical procedure failed to reach its tolerance."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge; carries the achieved tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class PostSelectionError(ProtmeasError):
    """Post-selected state is (nearly) orthogonal to the pre-selected one."""


class UsageError(ProtmeasError):
    """Invalid experiment configuration; names the violated precondition."""
