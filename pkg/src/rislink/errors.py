"""Exception types shared across the package.

Configuration problems derive from ``ValueError`` and map to CLI exit code 2;
numerical failures derive from ``RuntimeError`` and map to exit code 3.
"""


class InvalidParameterError(ValueError):
    """A scalar or config field is out of its documented domain."""


class DimensionMismatchError(ValueError):
    """Vector/matrix shapes are inconsistent with the system dimensions."""


class InvalidStatsError(ValueError):
    """Gain statistics are unusable (for example sigma <= 0)."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (final residual {residual:.3e})")
        self.residual = residual


class DegenerateMatrixError(RuntimeError):
    """The quadratic form carries no energy (all-zero matrix)."""


class DegenerateBeamError(RuntimeError):
    """The beam is orthogonal to the cascade, so no phase alignment exists."""


class DegenerateStatsError(RuntimeError):
    """Both gain projections vanish; the Rice noncentrality is undefined."""


class IntegrationError(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(
            f"{message} (estimate {estimate:.12g}, error bound {error_bound:.3e})"
        )
        self.estimate = estimate
        self.error_bound = error_bound
