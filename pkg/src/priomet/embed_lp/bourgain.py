"""Subset-restricted embeddings and the forced-set extension step.

`bourgain_restricted` embeds all of X so that contraction is controlled for
K x X pairs: the sampled inner map handles K x K, a single distance-to-K
coordinate handles points far from K, and a case split ties them together.
`partial_bourgain` is the inductive variant that must also vanish on an
already-handled set A; its contract is a verified disjunction: every K x X
pair is separated either by the new map or by the previously built one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import MetricSpace, RetryBudgetExceededError
from .frechet import (
    FrechetMap,
    RETRY_BUDGET,
    inv_p,
    lp_norm_rows,
    phi_map,
)


@dataclass
class RestrictedEmbedding:
    """A Frechet map with its measured/certified contraction certificates."""

    fmap: FrechetMap
    K: tuple
    p: float
    inner_contraction: float    # measured worst d/||.|| over K x K of the inner map
    kx_contraction_bound: float  # 3 * 2^(1/p) * inner_contraction, proven on K x X
    attempts: int

    @property
    def dim(self) -> int:
        return self.fmap.dim

    def evaluate(self, m_or_dist) -> np.ndarray:
        return self.fmap.evaluate(m_or_dist)


def bourgain_restricted(
    m: MetricSpace, K, p: float, seed: int = 0
) -> RestrictedEmbedding:
    """Non-expansive on X x X; contraction <= 3 * 2^(1/p) * alpha on K x X,
    where alpha is the inner map's measured (and retry-certified) K x K
    contraction. Dimension O(log^2 |K|) + 1."""
    K = tuple(sorted(int(x) for x in K))
    if len(K) < 2:
        raise ValueError("bourgain_restricted needs |K| >= 2")
    D = m.dist
    inner, info = phi_map(m, (), K, p, seed=seed)
    coords = inner.evaluate(D)
    Karr = np.array(K)
    alpha = 1.0
    for a in range(len(K)):
        diffs = coords[Karr] - coords[Karr[a]]
        norms = lp_norm_rows(diffs, p)
        d = D[Karr[a], Karr]
        mask = d > 0
        if mask.any():
            alpha = max(alpha, float((d[mask] / norms[mask]).max()))
    half = 2.0 ** (-inv_p(p))
    sets = inner.sets + (K,)
    scales = np.concatenate([inner.scales * half, [half]])
    fmap = FrechetMap(sets, scales, p)
    return RestrictedEmbedding(
        fmap=fmap,
        K=K,
        p=p,
        inner_contraction=alpha,
        kx_contraction_bound=3.0 * 2.0 ** inv_p(p) * alpha,
        attempts=info["attempts"],
    )


@dataclass
class PartialEmbedding:
    """Output of the forced-set step, with its verified disjunction data."""

    fmap: FrechetMap
    A: tuple
    K: tuple
    p: float
    D_in: float                  # caller-certified contraction of g on A x X
    branch_new: int              # pairs covered by the new map's bound
    branch_old: int              # pairs needing the previous map's bound
    attempts: int

    @property
    def dim(self) -> int:
        return self.fmap.dim

    def evaluate(self, m_or_dist) -> np.ndarray:
        return self.fmap.evaluate(m_or_dist)


def partial_bourgain(
    m: MetricSpace,
    A,
    K,
    g_coords: np.ndarray,
    D_in: float,
    p: float,
    seed: int = 0,
    *,
    retry_budget: int = RETRY_BUDGET,
) -> PartialEmbedding:
    """Non-expansive map vanishing on A with the two-branch K x X guarantee.

    For every (x, y) in K x X, post-retry, at least one of
        ||f(x)-f(y)||_p >= d(x,y) / (1000 * D_in * ceil(log2 k)),
        ||g(x)-g(y)||_p >= d(x,y) / (2 * D_in)
    holds, where g is the caller's map with contraction at most D_in on
    A x X. Construction: the sampled map over K with A forced into every
    anchor set, one distance-to-(A u K) coordinate, all scaled by 2^(-1/p).
    """
    A = tuple(sorted(int(a) for a in A))
    K = tuple(sorted(int(x) for x in K))
    if not K:
        raise ValueError("K must be nonempty")
    if D_in < 1.0:
        raise ValueError("contraction certificate D must be >= 1")
    D = m.dist
    n = D.shape[0]
    k = len(K)
    logk = max(1, math.ceil(math.log2(max(k, 2))))
    half = 2.0 ** (-inv_p(p))
    need_new = D / (1000.0 * D_in * logk)
    need_old = D / (2.0 * D_in)
    g_norm_cache = {}

    def g_norms(x):
        if x not in g_norm_cache:
            if g_coords is None or g_coords.shape[1] == 0:
                g_norm_cache[x] = np.zeros(n)
            else:
                g_norm_cache[x] = lp_norm_rows(g_coords - g_coords[x], p)
        return g_norm_cache[x]

    key = seed if isinstance(seed, tuple) else (seed,)
    for attempt in range(retry_budget):
        if k >= 2:
            inner, _ = phi_map(m, A, K, p, seed=(*key, attempt))
            sets = inner.sets + (tuple(sorted(set(A) | set(K))),)
            scales = np.concatenate([inner.scales * half, [half]])
        else:
            sets = (tuple(sorted(set(A) | set(K))),)
            scales = np.array([half])
        fmap = FrechetMap(sets, scales, p)
        coords = fmap.evaluate(D)
        ok = True
        branch_new = branch_old = 0
        for x in K:
            fn = lp_norm_rows(coords - coords[x], p)
            covered_new = fn >= need_new[x] - 1e-15
            covered_old = g_norms(x) >= need_old[x] - 1e-15
            good = covered_new | covered_old
            good[x] = True
            if not good.all():
                ok = False
                break
            branch_new += int(covered_new.sum())
            branch_old += int((~covered_new & covered_old).sum())
        if ok:
            return PartialEmbedding(
                fmap=fmap, A=A, K=K, p=p, D_in=D_in,
                branch_new=branch_new, branch_old=branch_old,
                attempts=attempt + 1,
            )
    raise RetryBudgetExceededError(
        f"two-branch certification failed on all {retry_budget} attempts"
    )
