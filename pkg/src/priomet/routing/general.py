"""Compact routing for general graphs over a tree cover.

Every landmark z spans a shortest-path tree over the cluster of vertices
whose bunch contains z. A vertex's routing table holds its bunch plus one
O(1) tree table per tree it belongs to; its label lists, per level from its
start level up, the pivot and its own routing label inside that pivot's
tree. The sender picks the first labeled pivot present in its own bunch and
the message then travels hop-by-hop with the fixed (tree root, tree label)
header.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import (
    PriorityRanking,
    RoutingError,
    WeightedGraph,
    shortest_path_forest,
)
from ..labeling import build_prioritized_labels
from .tree import TreeRoutingLabel, TreeRoutingScheme, build_scheme_from_adjacency, route_tree


@dataclass
class GeneralRoutingLabel:
    vertex: int
    rank: int
    entries: list   # [(level, pivot, pivot distance, TreeRoutingLabel)] levels ascending

    def size_words(self) -> int:
        return sum(2 + lab.size_words() for _, _, _, lab in self.entries)


@dataclass
class RouteRecord:
    source: int
    target: int
    hops: list
    length: float
    tree_root: int | None
    level: int | None
    delivered: bool


@dataclass
class GeneralRoutingScheme:
    n: int
    t: int
    seed: int
    ranking: PriorityRanking
    bunch_dist: list       # v -> {landmark: distance}
    trees: dict            # root z -> TreeRoutingScheme
    labels: list           # v -> GeneralRoutingLabel
    edge_weight: dict
    attempts: int = 1
    start_level: np.ndarray = field(default=None, repr=False)

    def label_of(self, v: int) -> GeneralRoutingLabel:
        return self.labels[v]

    def table_words(self, v: int) -> int:
        words = 2 * len(self.bunch_dist[v])
        for z in self.bunch_dist[v]:
            words += self.trees[z].tables[v].size_words()
        return words


def build_general_routing(
    g: WeightedGraph,
    r: PriorityRanking | None = None,
    t: int = 2,
    seed: int = 0,
    *,
    forest=None,
) -> GeneralRoutingScheme:
    n = g.n
    if r is None:
        r = PriorityRanking.identity(n)
    if forest is None:
        forest = shortest_path_forest(g)
    dist, parents = forest
    scheme = build_prioritized_labels(g, r, t, seed, forest=forest)
    oracle = scheme.oracle

    clusters = {}
    for v in range(n):
        for z in oracle.bunches[v]:
            clusters.setdefault(z, []).append(v)

    wmap = {}
    for a, b, w in g.edges:
        wmap[(a, b)] = w
        wmap[(b, a)] = w

    trees = {}
    for z, members in sorted(clusters.items()):
        adj = {v: [] for v in members}
        if z not in adj:
            raise RoutingError("landmark missing from its own cluster")
        for v in members:
            if v == z:
                continue
            p = int(parents[z, v])
            if p not in adj:
                raise RoutingError("cluster is not shortest-path closed")
            adj[v].append((p, wmap[(v, p)]))
            adj[p].append((v, wmap[(v, p)]))
        # deduplicate (child lists built from both directions)
        adj = {v: sorted(set(nb)) for v, nb in adj.items()}
        local_rank = {v: i + 1 for i, v in
                      enumerate(sorted(members, key=r.rank_of))}
        trees[z] = build_scheme_from_adjacency(adj, z, local_rank)

    labels = []
    for v in range(n):
        entries = []
        for h in range(int(oracle.start_level[v]), t):
            z = int(oracle.pivots[v, h])
            entries.append(
                (h, z, float(oracle.pivot_dist[v, h]), trees[z].labels[v])
            )
        labels.append(GeneralRoutingLabel(v, r.rank_of(v), entries))

    bunch_dist = [{w: d for w, (d, _) in oracle.bunches[v].items()} for v in range(n)]
    return GeneralRoutingScheme(
        n=n, t=t, seed=seed, ranking=r, bunch_dist=bunch_dist, trees=trees,
        labels=labels, edge_weight=wmap, attempts=scheme.attempts,
        start_level=oracle.start_level,
    )


def route_general(
    scheme: GeneralRoutingScheme,
    source: int,
    target_label: GeneralRoutingLabel,
    trace: list | None = None,
) -> RouteRecord:
    """Deliver to the labeled target; returns the full hop record.

    The sender's bunch lookup is local computation (zero hops); afterwards
    the header is the fixed (tree root, tree label) pair.
    """
    target = target_label.vertex
    if source == target:
        return RouteRecord(source, target, [source], 0.0, None, None, True)
    chosen = None
    for h, z, pd, tlab in target_label.entries:
        if trace is not None:
            trace.append((h, z, pd))
        if z in scheme.bunch_dist[source]:
            chosen = (h, z, tlab)
            break
    if chosen is None:
        raise RoutingError(
            f"no labeled pivot of {target} lies in the bunch of {source}"
        )
    h, z, tlab = chosen
    hops = route_tree(scheme.trees[z], source, tlab)
    if hops[-1] != target:
        raise RoutingError("tree routing missed the target")
    length = 0.0
    for a, b in zip(hops, hops[1:]):
        length += scheme.edge_weight[(a, b)]
    return RouteRecord(source, target, hops, length, z, h, True)
