"""Exception types shared across the package."""


class TinRegionError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TinRegionError, ValueError):
    """Invalid input data (bad channel, covariance, strategy, or config)."""


class ConvergenceError(TinRegionError, RuntimeError):
    """An iterative solver failed to converge within its iteration budget."""
