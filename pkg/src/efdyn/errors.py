"""Exception types shared across efdyn."""


class DomainError(ValueError):
    """An argument lies outside the set where a formula is real and finite."""


class UnsupportedCaseError(DomainError):
    """A parameter combination for which no formula is available."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature could not reach the requested accuracy."""


class IntegrationError(ArithmeticError):
    """An ODE integration failed; ``trajectory`` holds the samples computed so far."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
