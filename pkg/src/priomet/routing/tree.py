"""Compact tree routing with priority-weighted heavy/light decomposition.

Each vertex gets weight 1/(2^i (i+1)^2), where i is the index of its rank's
dyadic block; a child is heavy when its subtree outweighs half of its
parent's. DFS numbers visit light children first, so every routing decision
is a pair of interval tests on O(1) local words; the destination label
carries one port per light vertex on its root path, at most
log j + 2 log(log j + 2) + 2 ports for a rank-j destination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import NotATreeError, PriorityRanking, RoutingError, WeightedGraph


def priority_weight(rank: int) -> float:
    """1/(2^i (i+1)^2) with i = 0 for rank 1, else ceil(log2 rank)."""
    i = 0 if rank == 1 else math.ceil(math.log2(rank))
    return 1.0 / (2**i * (i + 1) ** 2)


@dataclass
class TreeTable:
    """Per-vertex routing table: O(1) words."""

    dfs: int
    f: int               # largest DFS number in the subtree
    h: int               # heavy child's DFS number, or f+1 if none
    port_parent: int     # -1 at the root
    port_heavy: int      # -1 if no heavy child
    light_level: int     # light vertices on the root path, inclusive

    def size_words(self) -> int:
        return 6


@dataclass
class TreeRoutingLabel:
    target_dfs: int
    ports: tuple         # port taken at the parent of each light vertex on the path

    def size_words(self) -> int:
        return 1 + len(self.ports)


@dataclass
class TreeRoutingScheme:
    root: int
    tables: dict          # vertex -> TreeTable
    labels: dict          # vertex -> TreeRoutingLabel
    ports: dict           # vertex -> list of tree neighbors in port order
    vertex_by_dfs: dict
    weights: dict         # vertex -> p(v)
    subtree_weight: dict  # vertex -> s_v
    heavy_child: dict     # vertex -> heavy child or None
    parent: dict

    @property
    def vertices(self):
        return self.tables.keys()

    def table_words(self) -> int:
        return sum(t.size_words() for t in self.tables.values())


def build_scheme_from_adjacency(adj: dict, root: int, rank_of: dict) -> TreeRoutingScheme:
    """Core builder over a tree given as {v: [(neighbor, weight), ...]}.

    `rank_of` maps each member vertex to its (local) priority rank 1..k.
    """
    vertices = sorted(adj)
    ports = {v: sorted(x for x, _ in adj[v]) for v in vertices}
    parent = {root: None}
    order = [root]
    for x in order:
        for y in ports[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
    if len(order) != len(vertices):
        raise NotATreeError("adjacency is not a connected tree")
    children = {v: [] for v in vertices}
    for v in order[1:]:
        children[parent[v]].append(v)

    weights = {v: priority_weight(rank_of[v]) for v in vertices}
    sub = dict(weights)
    for v in reversed(order[1:]):
        sub[parent[v]] += sub[v]

    heavy_child = {}
    for v in vertices:
        heavy = None
        for c in children[v]:
            if sub[c] > sub[v] / 2.0:
                if heavy is not None:
                    raise RoutingError("two heavy children (weights corrupt)")
                heavy = c
        heavy_child[v] = heavy

    # Preorder DFS, light children (by id) before the heavy child.
    dfs_of = {}
    counter = 0
    stack = [root]
    while stack:
        v = stack.pop()
        dfs_of[v] = counter
        counter += 1
        lights = [c for c in children[v] if c != heavy_child[v]]
        todo = []
        todo.extend(sorted(lights))
        if heavy_child[v] is not None:
            todo.append(heavy_child[v])
        stack.extend(reversed(todo))

    size = {v: 1 for v in vertices}
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]

    light_level = {root: 0}
    for v in order[1:]:
        is_light = heavy_child[parent[v]] != v
        light_level[v] = light_level[parent[v]] + (1 if is_light else 0)

    def port_index(v, target):
        try:
            return ports[v].index(target)
        except ValueError:
            raise RoutingError(f"{target} is not a tree neighbor of {v}") from None

    tables = {}
    for v in vertices:
        f_v = dfs_of[v] + size[v] - 1
        hc = heavy_child[v]
        tables[v] = TreeTable(
            dfs=dfs_of[v],
            f=f_v,
            h=dfs_of[hc] if hc is not None else f_v + 1,
            port_parent=port_index(v, parent[v]) if parent[v] is not None else -1,
            port_heavy=port_index(v, hc) if hc is not None else -1,
            light_level=light_level[v],
        )

    labels = {}
    for v in vertices:
        path = []
        x = v
        while x is not None:
            path.append(x)
            x = parent[x]
        path.reverse()
        light_ports = []
        for p, c in zip(path, path[1:]):
            if heavy_child[p] != c:
                light_ports.append(port_index(p, c))
        labels[v] = TreeRoutingLabel(dfs_of[v], tuple(light_ports))

    return TreeRoutingScheme(
        root=root,
        tables=tables,
        labels=labels,
        ports=ports,
        vertex_by_dfs={d: v for v, d in dfs_of.items()},
        weights=weights,
        subtree_weight=sub,
        heavy_child=heavy_child,
        parent=parent,
    )


def build_tree_routing(
    tree: WeightedGraph, r: PriorityRanking | None = None, root: int = 0
) -> TreeRoutingScheme:
    """Tables and labels for routing on a spanning tree of itself."""
    if not tree.is_tree():
        raise NotATreeError("build_tree_routing requires a tree")
    if r is None:
        r = PriorityRanking.identity(tree.n)
    adj = {v: list(tree.adjacency()[v]) for v in range(tree.n)}
    rank_of = {v: r.rank_of(v) for v in range(tree.n)}
    return build_scheme_from_adjacency(adj, root, rank_of)


def route_tree(scheme: TreeRoutingScheme, source: int, label: TreeRoutingLabel):
    """Hop-by-hop delivery; each decision uses the local table and the label.

    Returns the vertex sequence from source to target (inclusive).
    """
    if source not in scheme.tables:
        raise RoutingError(f"source {source} not in this tree")
    target = label.target_dfs
    hops = [source]
    w = source
    budget = len(scheme.tables) + 1
    while True:
        tbl = scheme.tables[w]
        if tbl.dfs == target:
            return hops
        if not (tbl.dfs <= target <= tbl.f):
            nxt = scheme.ports[w][tbl.port_parent]
        elif tbl.h <= target <= tbl.f:
            nxt = scheme.ports[w][tbl.port_heavy]
        else:
            idx = tbl.light_level
            if idx >= len(label.ports):
                raise RoutingError("corrupted label: light-port sequence exhausted")
            port = label.ports[idx]
            if port >= len(scheme.ports[w]):
                raise RoutingError(f"corrupted label: port {port} out of range at {w}")
            nxt = scheme.ports[w][port]
        hops.append(nxt)
        w = nxt
        budget -= 1
        if budget < 0:
            raise RoutingError("routing loop detected")


def light_label_bound(rank: int) -> float:
    """log j + 2 log(log j + 2) + 2 for j >= 2; the rank-1 guard gives 3."""
    if rank == 1:
        return 3.0
    lj = math.log2(rank)
    return lj + 2.0 * math.log2(lj + 2.0) + 2.0
