"""Undirected weighted graphs, file I/O and shortest-path primitives."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DisconnectedGraphError,
    GraphFormatError,
    NegativeWeightError,
    SelfLoopError,
)


@dataclass
class WeightedGraph:
    """Undirected weighted graph on vertices 0..n-1.

    Invariants enforced at construction: no self-loops, finite nonnegative
    weights, connected.
    """

    n: int
    edges: tuple  # of (u, v, w)
    _adj: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.edges = tuple((int(u), int(v), float(w)) for u, v, w in self.edges)
        if self.n < 1:
            raise GraphFormatError(f"vertex count must be positive, got {self.n}")
        for u, v, w in self.edges:
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"edge ({u},{v}) out of range for n={self.n}")
            if not math.isfinite(w) or w < 0:
                raise NegativeWeightError(f"edge ({u},{v}) has invalid weight {w}")
        self._adj = None
        if not self._connected():
            raise DisconnectedGraphError("graph is not connected")

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self):
        """Neighbor lists [(v, w), ...] sorted by neighbor id (deterministic)."""
        if self._adj is None:
            adj = [[] for _ in range(self.n)]
            for u, v, w in self.edges:
                adj[u].append((v, w))
                adj[v].append((u, w))
            for lst in adj:
                lst.sort()
            self._adj = adj
        return self._adj

    def _connected(self) -> bool:
        if self.n == 1:
            return True
        seen = [False] * self.n
        stack = [0]
        seen[0] = True
        count = 1
        adj = self.adjacency()
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        return count == self.n

    def is_tree(self) -> bool:
        return self.m == self.n - 1

    def degree(self, v: int) -> int:
        return len(self.adjacency()[v])


def dijkstra(g: WeightedGraph, source: int):
    """Single-source shortest paths.

    Returns (dist, parent) arrays; parent[v] is v's predecessor in the
    shortest-path tree rooted at `source` (the next hop from v toward the
    source), parent[source] = source. Ties are broken deterministically by
    processing order, which is fixed by the sorted adjacency lists.
    """
    n = g.n
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    dist[source] = 0.0
    parent[source] = source
    adj = g.adjacency()
    heap = [(0.0, source)]
    done = [False] * n
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    if not all(done):
        raise DisconnectedGraphError("unreachable vertex in shortest-path run")
    return dist, parent


def shortest_path_forest(g: WeightedGraph):
    """All-sources Dijkstra.

    Returns (D, P) where D[s, v] is the distance and P[s, v] the predecessor
    of v in the tree rooted at s, i.e. the next hop from v toward s.
    """
    n = g.n
    D = np.empty((n, n))
    P = np.empty((n, n), dtype=np.int64)
    for s in range(n):
        D[s], P[s] = dijkstra(g, s)
    return D, P


def load_graph(path) -> WeightedGraph:
    """Parse the text edge-list format.

    First non-comment line: "n m"; then m lines "u v w". '#' starts a comment.
    """
    with open(path, "r") as fh:
        lines = fh.readlines()
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if text:
            rows.append((lineno, text))
    if not rows:
        raise GraphFormatError(f"{path}: empty graph file")
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 2:
        raise GraphFormatError(f"{path}:{lineno}: expected header 'n m', got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphFormatError(f"{path}:{lineno}: non-integer header {header!r}") from None
    if len(rows) - 1 != m:
        raise GraphFormatError(f"{path}: header promises {m} edges, found {len(rows) - 1}")
    edges = []
    for lineno, text in rows[1:]:
        parts = text.split()
        if len(parts) != 3:
            raise GraphFormatError(f"{path}:{lineno}: expected 'u v w', got {text!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphFormatError(f"{path}:{lineno}: malformed edge line {text!r}") from None
        edges.append((u, v, w))
    return WeightedGraph(n, tuple(edges))


def save_graph(g: WeightedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v, w in g.edges:
            fh.write(f"{u} {v} {w!r}\n")
