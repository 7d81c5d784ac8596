"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """Time integration hit its step/horizon budget before reaching steady state.

    Carries the last accepted state and its residual so callers can inspect
    (or penalize) the partial result.
    """

    def __init__(self, message, state=None, residual=None, n=None):
        super().__init__(message)
        self.state = state
        self.residual = residual
        self.n = n


class NumericalError(RuntimeError):
    """The integrator produced a state outside the population simplex."""


class SingularFixedPointError(ValueError):
    """A closed-form fixed point formula is singular for these parameters."""


class UndefinedSpeedupError(ValueError):
    """Speedup is undefined for c_s = 0 (throughput is still available)."""


class DatasetParseError(ValueError):
    """Malformed dataset text; `line` is the 1-based offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
