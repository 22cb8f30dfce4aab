"""Exception hierarchy for the h-function pipeline."""


class HFunctionError(Exception):
    """Base class for all errors raised by this package."""


class CapacityError(HFunctionError, ValueError):
    """Requested level exceeds the configured maximum slit count."""


class GeometryError(HFunctionError, ValueError):
    """Invalid or inconsistent geometric input (bracketing failure, bad frame...)."""


class ConvergenceError(HFunctionError, RuntimeError):
    """An iterative procedure did not reach its tolerance.

    ``history`` carries the residual or criterion sequence observed.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class NearBoundaryError(HFunctionError, ValueError):
    """Evaluation point too close to the boundary for the Cauchy quadrature."""


class OracleAccuracyError(HFunctionError, RuntimeError):
    """Collocation oracle failed to fit its boundary data to tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConsistencyError(HFunctionError, RuntimeError):
    """Assembled output violates a structural property (e.g. monotonicity)."""


class SamplingError(HFunctionError, RuntimeError):
    """Near-threshold sampling could not bracket the requested radii."""


class AccuracyWarning(UserWarning):
    """A diagnostic exceeded its soft tolerance; results may be degraded."""
