"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConfigurationError(ValueError):
    """A parameter combination cannot be used (e.g. degenerate decoy intensities)."""


class EstimationInfeasibleError(ArithmeticError):
    """Observed statistics do not allow a bound to be computed."""


class ConsistencyError(ArithmeticError):
    """A numerical result violates an identity it must satisfy analytically."""


class SimulationError(RuntimeError):
    """A Monte-Carlo session could not be completed."""
