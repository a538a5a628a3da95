"""Exception hierarchy shared by all priomet modules."""


class PriometError(Exception):
    """Base class for all errors raised by this package."""


class GraphFormatError(PriometError):
    """Malformed graph/metric/ranking file."""


class SelfLoopError(PriometError):
    """Edge with identical endpoints."""


class NegativeWeightError(PriometError):
    """Edge weight negative or non-finite."""


class DisconnectedGraphError(PriometError):
    """Input graph is not connected."""


class NotATreeError(PriometError):
    """Operation requires a tree input."""


class NonMetricError(PriometError):
    """Distance matrix violates metric axioms."""


class PhiViolationError(PriometError):
    """Priority-distortion function rejected by the reciprocal-sum test."""


class RetryBudgetExceededError(PriometError):
    """A randomized build failed its acceptance condition on every attempt."""


class RoutingError(PriometError):
    """Undeliverable message or corrupted routing label."""


class QueryError(PriometError):
    """Invalid query arguments (unknown vertex, mismatched builds, ...)."""
