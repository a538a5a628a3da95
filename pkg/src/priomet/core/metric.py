"""Finite metric spaces backed by dense distance matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraphError, GraphFormatError, NonMetricError
from .graph import WeightedGraph, shortest_path_forest

REL_TOL = 1e-9


@dataclass
class MetricSpace:
    """n points with a symmetric nonnegative distance matrix.

    Zero diagonal, strictly positive off-diagonal, triangle inequality within
    relative tolerance 1e-9.
    """

    dist: np.ndarray

    def __post_init__(self):
        self.dist = np.asarray(self.dist, dtype=np.float64)
        validate_metric(self.dist)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def diameter(self) -> float:
        return float(self.dist.max())

    def min_positive(self) -> float:
        n = self.n
        if n < 2:
            return 0.0
        off = self.dist[~np.eye(n, dtype=bool)]
        return float(off.min())


def validate_metric(D: np.ndarray, rel_tol: float = REL_TOL) -> None:
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise NonMetricError(f"distance matrix must be square, got shape {D.shape}")
    n = D.shape[0]
    if not np.all(np.isfinite(D)):
        raise NonMetricError("non-finite distance")
    if np.any(np.abs(np.diagonal(D)) > 0):
        raise NonMetricError("nonzero diagonal")
    scale = max(D.max(), 1.0)
    if np.any(np.abs(D - D.T) > rel_tol * scale):
        raise NonMetricError("asymmetric distance matrix")
    if n > 1:
        off = D[~np.eye(n, dtype=bool)]
        if np.any(off <= 0):
            raise NonMetricError("non-positive distance between distinct points")
    # Triangle inequality: D[i,j] <= D[i,k] + D[k,j] within relative tolerance.
    for k in range(n):
        via = D[:, k, None] + D[None, k, :]
        if np.any(D > via + rel_tol * np.maximum(D, 1e-300)):
            i, j = np.unravel_index(np.argmax(D - via), D.shape)
            raise NonMetricError(
                f"triangle inequality violated: d({i},{j})={D[i, j]} > "
                f"d({i},{k})+d({k},{j})={via[i, j]}"
            )


def exact_distances(g: WeightedGraph) -> MetricSpace:
    """Ground-truth all-pairs shortest-path metric (Dijkstra from every vertex)."""
    D, _ = shortest_path_forest(g)
    if not np.all(np.isfinite(D)):
        raise DisconnectedGraphError("unreachable pair in shortest-path metric")
    # Symmetrize away float accumulation noise from the per-source runs.
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0.0)
    return MetricSpace(D)


def load_metric(path) -> MetricSpace:
    """Parse the text metric format: first line "n", then n rows of n decimals."""
    with open(path, "r") as fh:
        rows = [ln.split("#", 1)[0].strip() for ln in fh]
    rows = [r for r in rows if r]
    if not rows:
        raise GraphFormatError(f"{path}: empty metric file")
    try:
        n = int(rows[0])
    except ValueError:
        raise GraphFormatError(f"{path}: bad point count {rows[0]!r}") from None
    if len(rows) - 1 != n:
        raise GraphFormatError(f"{path}: expected {n} rows, found {len(rows) - 1}")
    try:
        D = np.array([[float(x) for x in r.split()] for r in rows[1:]])
    except ValueError:
        raise GraphFormatError(f"{path}: non-numeric entry in matrix") from None
    if D.shape != (n, n):
        raise GraphFormatError(f"{path}: matrix shape {D.shape} != ({n},{n})")
    return MetricSpace(D)


def save_metric(m: MetricSpace, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{m.n}\n")
        for row in m.dist:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")
