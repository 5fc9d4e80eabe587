"""Exception types shared across the package."""


class GuardExceeded(RuntimeError):
    """An enumeration or table would exceed a desk-scale size guard."""


class InfeasibleMoments(RuntimeError):
    """No atomic measure matched the moment vector within tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
