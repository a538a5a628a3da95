"""Frechet coordinate maps, the gamma-distance, and the verified sampler.

Every coordinate is a scaled distance to an anchor set, hence 1-Lipschitz;
the sampler draws dyadic-density subsets of K (always unioned with the
forced set A so the map vanishes on A exactly) and retries with fresh seeds
until the gamma-distance separation bound holds exhaustively on K x K, so
shipped maps satisfy their stated bound deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import MetricSpace, RetryBudgetExceededError, seeded_rng

DEFAULT_SAMPLER_WIDTH = 24     # coordinates per density level, times log k
RETRY_BUDGET = 64


def lp_norm_rows(M: np.ndarray, p: float) -> np.ndarray:
    """Row-wise l_p norm; p = inf uses the max norm."""
    if M.ndim == 1:
        M = M[None, :]
    if math.isinf(p):
        return np.abs(M).max(axis=1) if M.shape[1] else np.zeros(M.shape[0])
    if p == 1:
        return np.abs(M).sum(axis=1)
    if p == 2:
        return np.sqrt((M * M).sum(axis=1))
    return (np.abs(M) ** p).sum(axis=1) ** (1.0 / p)


def inv_p(p: float) -> float:
    """Exponent 1/p with the p = inf convention 1/p = 0."""
    return 0.0 if math.isinf(p) else 1.0 / p


@dataclass(frozen=True)
class FrechetMap:
    """Coordinates x -> scale_c * d(x, S_c) for anchor sets S_c.

    An empty anchor set contributes a constant zero coordinate (it can occur
    in low-density samples and is harmless: zero coordinates are trivially
    non-expansive).
    """

    sets: tuple          # tuple of tuples of point ids
    scales: np.ndarray   # per-coordinate multipliers, each <= 1
    p: float

    @property
    def dim(self) -> int:
        return len(self.sets)

    def evaluate(self, m_or_dist) -> np.ndarray:
        """n-by-dim coordinate matrix over all points of the metric."""
        D = m_or_dist.dist if isinstance(m_or_dist, MetricSpace) else m_or_dist
        n = D.shape[0]
        out = np.zeros((n, self.dim))
        for c, anchors in enumerate(self.sets):
            if anchors:
                out[:, c] = self.scales[c] * D[:, list(anchors)].min(axis=1)
        return out


@dataclass
class GammaParams:
    """Reference set A with cached point-to-A distances (inf when A empty)."""

    A: tuple
    dist: np.ndarray = field(repr=False)
    d_to_A: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.A = tuple(sorted(int(a) for a in self.A))
        if self.d_to_A is None:
            n = self.dist.shape[0]
            if self.A:
                self.d_to_A = self.dist[:, list(self.A)].min(axis=1)
            else:
                self.d_to_A = np.full(n, np.inf)


def gamma_distance(x: int, y: int, gp: GammaParams) -> float:
    """min(d(x,y)/2, d(x,A), d(y,A)); with A empty this is d(x,y)/2."""
    return float(min(gp.dist[x, y] / 2.0, gp.d_to_A[x], gp.d_to_A[y]))


def gamma_matrix(gp: GammaParams) -> np.ndarray:
    half = gp.dist / 2.0
    return np.minimum(half, np.minimum(gp.d_to_A[:, None], gp.d_to_A[None, :]))


def phi_separation_bound(k: int, p: float) -> float:
    """Denominator of the certified K x K bound: 24^(1/p) * ceil(log2 k)."""
    levels = max(1, math.ceil(math.log2(max(k, 2))))
    return 24.0 ** inv_p(p) * levels


def phi_map(
    m: MetricSpace,
    A,
    K,
    p: float,
    seed: int = 0,
    *,
    width: int = DEFAULT_SAMPLER_WIDTH,
    retry_budget: int = RETRY_BUDGET,
):
    """Sampled Frechet map vanishing on A with a verified K x K lower bound.

    Returns (map, info). Post-retry, for every u, v in K:
        ||phi(u) - phi(v)||_p >= gamma_A(u, v) / (24^(1/p) * ceil(log2 k)).
    The sampler uses ceil(log2 k) density levels with width*ceil(log2 k)
    coordinates each; `width` is a success-probability knob only, since the
    bound is established by verification, not by the union bound.
    """
    A = tuple(sorted(int(a) for a in A))
    K = tuple(sorted(int(x) for x in K))
    k = len(K)
    if k < 2:
        raise ValueError("phi_map needs |K| >= 2")
    if set(A) & set(K):
        raise ValueError("A and K must be disjoint")
    D = m.dist
    levels = max(1, math.ceil(math.log2(k)))
    per_level = max(1, math.ceil(width * math.log2(max(k, 2))))
    scale = (levels * per_level) ** (-inv_p(p))
    gp = GammaParams(A, D)
    G = gamma_matrix(gp)
    denom = phi_separation_bound(k, p)
    Karr = np.array(K)
    key = seed if isinstance(seed, tuple) else (seed,)
    for attempt in range(retry_budget):
        rng = seeded_rng(*key, attempt)
        sets = []
        for i in range(1, levels + 1):
            prob = 2.0**-i
            for _ in range(per_level):
                mask = rng.random(k) < prob
                q = tuple(sorted(set(Karr[mask].tolist()) | set(A)))
                sets.append(q)
        fmap = FrechetMap(tuple(sets), np.full(len(sets), scale), p)
        coords = fmap.evaluate(D)
        ok = True
        for a in range(k):
            diffs = coords[Karr] - coords[Karr[a]]
            norms = lp_norm_rows(diffs, p)
            need = G[Karr[a], Karr] / denom
            if np.any(norms < need - 1e-15):
                ok = False
                break
        if ok:
            return fmap, {"attempts": attempt + 1, "levels": levels,
                          "per_level": per_level, "dim": fmap.dim,
                          "bound_denominator": denom}
    raise RetryBudgetExceededError(
        f"gamma separation bound failed on all {retry_budget} attempts"
    )
