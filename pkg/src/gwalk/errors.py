"""Exception types raised by :mod:`gwalk`."""


class GWalkError(Exception):
    """Base class for all package errors."""


class GraphError(GWalkError, ValueError):
    """Invalid internal graph or boundary specification."""


class SingularFrequencyError(GWalkError):
    """The requested frequency lies on (or too close to) the singular set.

    The caller should dispatch to a singular-aware solver instead.
    """


class ConvergenceError(GWalkError):
    """The walk iteration did not settle within ``max_iter`` steps."""

    def __init__(self, message, iterations=None, last_diff=None):
        super().__init__(message)
        self.iterations = iterations
        self.last_diff = last_diff


class SolverError(GWalkError):
    """A numerical consistency check failed (residual, unitarity, rank)."""
