"""Exceptions raised by the logspiral package."""


class SpiralDomainError(ValueError):
    """Input outside the domain of an operation (beta, angle, strengths)."""


class NearCriticalError(SpiralDomainError):
    """Shape parameter inside a guard band around a critical value."""

    def __init__(self, message, beta=None, critical=None):
        super().__init__(message)
        self.beta = beta
        self.critical = critical


class SingularityError(SpiralDomainError):
    """Evaluation at a pole, asymptote or non-hyperbolic point."""


class NonHyperbolicError(SingularityError):
    """Equilibrium with a trace or determinant inside the hyperbolicity guard."""


class RootNotFoundError(RuntimeError):
    """A bracket holds no sign change, or a root expected unique is not."""


class UnresolvedDestinationError(RuntimeError):
    """Integration stopped at its horizon without a terminal event."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class StepSizeError(RuntimeError):
    """Adaptive step size collapsed; carries the last accepted state."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


# errors that the command line reports as a JSON object with exit status 3
DOMAIN_ERRORS = (
    SpiralDomainError,
    RootNotFoundError,
    UnresolvedDestinationError,
    StepSizeError,
)
