from .composed import (
    ComposedComponent,
    ComposedOracle,
    IterFunction,
    SourceRestrictedOracle,
    build_composed_oracle,
    build_source_restricted_oracle,
    log_star,
    preset,
    tau,
)
from .tz import (
    PrioritizedTZOracle,
    QueryView,
    build_tz_prioritized,
    compute_bunches,
    compute_pivots,
    landmark_scan,
    rank_threshold,
    sample_nested_sets,
    start_levels,
    tz_query,
    tz_query_path,
    walk_length,
)

__all__ = [
    "ComposedComponent",
    "ComposedOracle",
    "IterFunction",
    "PrioritizedTZOracle",
    "QueryView",
    "SourceRestrictedOracle",
    "build_composed_oracle",
    "build_source_restricted_oracle",
    "build_tz_prioritized",
    "compute_bunches",
    "compute_pivots",
    "landmark_scan",
    "log_star",
    "preset",
    "rank_threshold",
    "sample_nested_sets",
    "start_levels",
    "tau",
    "tz_query",
    "tz_query_path",
    "walk_length",
]
