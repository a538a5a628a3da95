from .general import (
    GeneralRoutingLabel,
    GeneralRoutingScheme,
    RouteRecord,
    build_general_routing,
    route_general,
)
from .tree import (
    TreeRoutingLabel,
    TreeRoutingScheme,
    TreeTable,
    build_scheme_from_adjacency,
    build_tree_routing,
    light_label_bound,
    priority_weight,
    route_tree,
)

__all__ = [
    "GeneralRoutingLabel",
    "GeneralRoutingScheme",
    "RouteRecord",
    "TreeRoutingLabel",
    "TreeRoutingScheme",
    "TreeTable",
    "build_general_routing",
    "build_scheme_from_adjacency",
    "build_tree_routing",
    "light_label_bound",
    "priority_weight",
    "route_general",
    "route_tree",
]
