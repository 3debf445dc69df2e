"""Exception types shared across the solver modules."""


class SolverError(Exception):
    """Base class for all solver errors."""


class NegativeTime(SolverError):
    """Forecast evaluated at t < 0."""


class NotConcave(SolverError):
    """Operation requires a concave forecast profile."""


class SlopeOutOfRange(SolverError):
    """Legendre transform slope outside (0, f'(0)]."""


class InterceptOutOfRange(SolverError):
    """No tangent with the requested intercept exists (intercept >= f_inf)."""


class NoTangent(SolverError):
    """Tangent condition f(tau) - tau*f'(tau) = 2c has no solution (f_inf <= 2c)."""


class NonPositiveRisk(SolverError):
    """Risk aversion k must be positive."""


class NonPositiveTau(SolverError):
    """Plateau time must be positive."""


class MismatchedGrid(SolverError):
    """Position path grid is empty or inconsistent."""


class BoundaryTermTooLarge(SolverError):
    """Integration-by-parts boundary term f(T)*P_final is not negligible."""


class NegativeWeight(SolverError):
    """Total-variation edge weights must be non-negative."""


class NotConverged(SolverError):
    """Path optimizer hit the iteration cap before meeting tolerance."""

    def __init__(self, message, best_path=None, last_rel_change=None):
        super().__init__(message)
        self.best_path = best_path
        self.last_rel_change = last_rel_change


class DegenerateZone(SolverError):
    """Empirical no-trade-zone search found no interior point."""

    def __init__(self, message, zone=None):
        super().__init__(message)
        self.zone = zone


class NonPositiveInput(SolverError):
    """Log-log fit requires strictly positive inputs."""


class ConfigError(SolverError):
    """Malformed run configuration."""
