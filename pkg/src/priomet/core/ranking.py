"""Priority rankings: a bijection between ranks 1..n and vertex ids 0..n-1.

Rank 1 is the highest priority. Every prioritized construction in the
package is driven by one of these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphFormatError
from .rng import seeded_rng


@dataclass
class PriorityRanking:
    vertex_by_rank: np.ndarray  # index k-1 holds the vertex of rank k

    def __post_init__(self):
        self.vertex_by_rank = np.asarray(self.vertex_by_rank, dtype=np.int64)
        n = self.n
        if sorted(self.vertex_by_rank.tolist()) != list(range(n)):
            raise GraphFormatError("ranking is not a bijection onto 0..n-1")
        self.rank_by_vertex = np.empty(n, dtype=np.int64)
        self.rank_by_vertex[self.vertex_by_rank] = np.arange(1, n + 1)

    @property
    def n(self) -> int:
        return len(self.vertex_by_rank)

    def rank_of(self, v: int) -> int:
        """1-based rank of vertex v."""
        return int(self.rank_by_vertex[v])

    def vertex_of(self, rank: int) -> int:
        return int(self.vertex_by_rank[rank - 1])

    def top(self, count: int) -> np.ndarray:
        """Vertices of ranks 1..count."""
        return self.vertex_by_rank[:count]

    @staticmethod
    def identity(n: int) -> "PriorityRanking":
        """Default ranking: vertex i has rank i+1."""
        return PriorityRanking(np.arange(n))

    @staticmethod
    def random(n: int, seed: int) -> "PriorityRanking":
        rng = seeded_rng(seed)
        return PriorityRanking(rng.permutation(n))


def load_ranking(path) -> PriorityRanking:
    """Parse the ranking format: n lines, line k holds the vertex of rank k."""
    with open(path, "r") as fh:
        rows = [ln.split("#", 1)[0].strip() for ln in fh]
    rows = [r for r in rows if r]
    try:
        perm = [int(r) for r in rows]
    except ValueError:
        raise GraphFormatError(f"{path}: non-integer ranking line") from None
    return PriorityRanking(np.array(perm))


def save_ranking(r: PriorityRanking, path) -> None:
    with open(path, "w") as fh:
        for v in r.vertex_by_rank:
            fh.write(f"{int(v)}\n")
