from .errors import (
    DisconnectedGraphError,
    GraphFormatError,
    NegativeWeightError,
    NonMetricError,
    NotATreeError,
    PhiViolationError,
    PriometError,
    QueryError,
    RetryBudgetExceededError,
    RoutingError,
    SelfLoopError,
)
from .graph import WeightedGraph, dijkstra, load_graph, save_graph, shortest_path_forest
from .metric import MetricSpace, exact_distances, load_metric, save_metric, validate_metric
from .ranking import PriorityRanking, load_ranking, save_ranking
from .rng import seeded_rng
from .stretch import (
    StretchBucket,
    StretchReport,
    max_threads,
    measure_prioritized_stretch,
    rank_bucket,
)

__all__ = [
    "DisconnectedGraphError",
    "GraphFormatError",
    "MetricSpace",
    "NegativeWeightError",
    "NonMetricError",
    "NotATreeError",
    "PhiViolationError",
    "PriometError",
    "PriorityRanking",
    "QueryError",
    "RetryBudgetExceededError",
    "RoutingError",
    "SelfLoopError",
    "StretchBucket",
    "StretchReport",
    "WeightedGraph",
    "dijkstra",
    "exact_distances",
    "load_graph",
    "load_metric",
    "load_ranking",
    "max_threads",
    "measure_prioritized_stretch",
    "rank_bucket",
    "save_graph",
    "save_metric",
    "save_ranking",
    "seeded_rng",
    "shortest_path_forest",
    "validate_metric",
]
