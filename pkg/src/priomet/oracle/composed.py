"""Small-space composed oracles: per-priority-prefix sub-oracles.

For a monotone iterator function f (with f(1) = 2) and its iterate F, the
composed oracle builds, for each phase i, a source-restricted oracle for the
top n^(1-1/F(i)) ranked vertices with parameter F(i)-1, plus a fallback over
all pairs. A query takes the minimum of the first applicable sub-oracle and
the fallback. The inner K x K black boxes are this package's own landmark
oracle (see the ledgered substitution), so inner stretch is 2t-1 with O(t)
query time and the fallback is the landmark oracle at t = log n with
stretch 2*log(n) - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import PriorityRanking, QueryError, WeightedGraph, shortest_path_forest
from .tz import PrioritizedTZOracle, build_tz_prioritized, tz_query


def tau(j: int, n: int) -> int:
    """floor(log n / log(n/j)) via exact integer arithmetic; capped at 64."""
    if j < 1:
        raise ValueError("rank must be >= 1")
    k = 1
    while k < 64 and n**k <= j ** (k + 1):
        k += 1
    return k


def log_star(n: int) -> int:
    """Minimal k with tower(k) >= n."""
    k, v = 0, 1
    while v < n:
        v = 2**v
        k += 1
    return k


@dataclass
class IterFunction:
    """Monotone integer function f with f(1) = 2 and its iterate F."""

    f: object          # callable int -> int
    T: int
    name: str = "custom"

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("phase count T must be >= 1")
        if self.f(1) != 2:
            raise ValueError("iterator function must satisfy f(1) = 2")
        vals = [1]
        for _ in range(self.T):
            nxt = int(self.f(vals[-1]))
            if nxt <= vals[-1]:
                raise ValueError("iterator function must be strictly increasing")
            vals.append(nxt)
        self.F = vals  # F[0..T]

    def check_covers(self, n: int) -> None:
        need = math.ceil(math.log2(max(n, 2)))
        if self.F[self.T] < need:
            raise ValueError(
                f"F(T)={self.F[self.T]} < log2(n)={need}; increase T"
            )


def preset(name: int, n: int) -> IterFunction:
    """The five named space/stretch tradeoffs.

    1: f(k)=k+1, T=log n          (space ~ n log^2 n, stretch 4*tau-1)
    2: f(k)=2k,  T=loglog n       (space ~ n log n,   stretch 8*tau-5)
    3: same (T, f) as 2 -- the original distinction was a smaller inner
       black box, which this package substitutes (see ledger)
    4: f(1)=2, f(k)=k^2, T=1+logloglog n   (F(k) = 2^(2^(k-1)))
    5: f(k)=2^k, T=log*(n)-1               (F(k) = tower(k))
    """
    if n < 4:
        raise ValueError("presets need n >= 4")
    logn = math.ceil(math.log2(n))
    if name == 1:
        fn = IterFunction(lambda k: k + 1, max(1, logn), name="preset1")
    elif name in (2, 3):
        T = max(1, math.ceil(math.log2(max(logn, 2))))
        fn = IterFunction(lambda k: 2 * k, T, name=f"preset{name}")
    elif name == 4:
        T = 1 + max(0, math.ceil(math.log2(max(math.log2(max(logn, 2)), 1))))
        fn = IterFunction(lambda k: 2 if k == 1 else k * k, max(1, T), name="preset4")
    elif name == 5:
        T = max(1, log_star(n) - 1)
        fn = IterFunction(lambda k: 2**k, T, name="preset5")
    else:
        raise ValueError(f"unknown preset {name}")
    # Rounding of the nominal T must never leave log n uncovered.
    while fn.F[fn.T] < logn:
        fn = IterFunction(fn.f, fn.T + 1, name=fn.name)
    fn.check_covers(n)
    return fn


def _complete_graph_over(K: np.ndarray, D: np.ndarray) -> WeightedGraph:
    k = len(K)
    edges = []
    for a in range(k):
        for b in range(a + 1, k):
            edges.append((a, b, float(D[K[a], K[b]])))
    return WeightedGraph(k, tuple(edges))


@dataclass
class SourceRestrictedOracle:
    """Answers K x V pairs: inner oracle over the metric closure of K plus a
    nearest-anchor table for everyone else. Stretch 4t-1 on K x V."""

    K: np.ndarray
    t: int
    index_of: dict
    inner: PrioritizedTZOracle | None   # None when |K| == 1
    anchor: np.ndarray
    anchor_dist: np.ndarray

    def query(self, v: int, u: int) -> float:
        in_v, in_u = v in self.index_of, u in self.index_of
        if not in_v and not in_u:
            raise QueryError("source-restricted query with both endpoints outside K")
        if not in_v:
            v, u = u, v
        if v == u:
            return 0.0
        ku = int(self.anchor[u])
        if self.inner is None:
            inner_d = 0.0
        else:
            inner_d = tz_query(self.inner, self.index_of[v], self.index_of[ku])
        return inner_d + float(self.anchor_dist[u])

    def size_words(self) -> int:
        inner = self.inner.size_words() if self.inner is not None else 0
        return inner + 2 * len(self.anchor)


def build_source_restricted_oracle(
    g: WeightedGraph,
    K,
    t: int,
    seed: int = 0,
    *,
    dist=None,
) -> SourceRestrictedOracle:
    """Inner landmark oracle on the complete graph over K, plus anchors."""
    K = np.sort(np.asarray(K, dtype=np.int64))
    if len(K) == 0:
        raise ValueError("K must be nonempty")
    if dist is None:
        dist, _ = shortest_path_forest(g)
    index_of = {int(v): i for i, v in enumerate(K)}
    inner = None
    if len(K) > 1:
        gk = _complete_graph_over(K, dist)
        inner = build_tz_prioritized(gk, PriorityRanking.identity(len(K)), t, seed)
    n = g.n
    anchor = np.empty(n, dtype=np.int64)
    anchor_dist = np.empty(n)
    sub = dist[:, K]
    arg = np.argmin(sub, axis=1)
    for u in range(n):
        if u in index_of:
            anchor[u] = u
            anchor_dist[u] = 0.0
        else:
            anchor[u] = K[arg[u]]
            anchor_dist[u] = sub[u, arg[u]]
    return SourceRestrictedOracle(K, t, index_of, inner, anchor, anchor_dist)


@dataclass
class ComposedComponent:
    phase: int
    t: int
    rank_threshold: int
    oracle: SourceRestrictedOracle


@dataclass
class ComposedOracle:
    n: int
    fn: IterFunction
    ranking: PriorityRanking
    components: list
    fallback: PrioritizedTZOracle
    seed: int
    size_words_total: int = field(default=0)

    def query(self, u: int, v: int) -> float:
        if u == v:
            return 0.0
        ju, jv = self.ranking.rank_of(u), self.ranking.rank_of(v)
        hi, lo, j = (u, v, ju) if ju <= jv else (v, u, jv)
        best = tz_query(self.fallback, u, v)
        for comp in self.components:
            if j <= comp.rank_threshold:
                best = min(best, comp.oracle.query(hi, lo))
                break
        return best

    def fallback_stretch(self) -> int:
        return 2 * self.fallback.t - 1

    def stretch_bound(self, j: int) -> float:
        """min(4 f(tau(j)) - 5, fallback stretch); the fallback term is the
        substituted 2*log(n)-1 rather than the black-box log n."""
        fb = self.fallback_stretch()
        cand = 4 * self.fn.f(tau(j, self.n)) - 5
        return min(cand, fb)


def build_composed_oracle(
    g: WeightedGraph,
    r: PriorityRanking | None = None,
    fn: IterFunction | None = None,
    seed: int = 0,
    *,
    forest=None,
) -> ComposedOracle:
    n = g.n
    if r is None:
        r = PriorityRanking.identity(n)
    if fn is None:
        fn = preset(2, n)
    fn.check_covers(n)
    if forest is None:
        forest = shortest_path_forest(g)
    dist, parents = forest
    components = []
    for i in range(1, fn.T + 1):
        Fi = fn.F[i]
        m_i = _rank_threshold_frac(n, Fi - 1, Fi)
        K = np.sort(r.top(m_i))
        oracle = build_source_restricted_oracle(g, K, max(1, Fi - 1),
                                                seed=seed * 131 + i, dist=dist)
        components.append(ComposedComponent(i, max(1, Fi - 1), m_i, oracle))
    t_fb = max(1, math.ceil(math.log2(n)))
    fallback = build_tz_prioritized(g, r, t_fb, seed=seed * 131, dist=dist,
                                    parents=parents)
    total = fallback.size_words() + sum(c.oracle.size_words() for c in components)
    return ComposedOracle(n, fn, r, components, fallback, seed, total)


def _rank_threshold_frac(n: int, num: int, den: int) -> int:
    """Largest j with j^den <= n^num (i.e. j <= n^(num/den)), exact."""
    target = n**num
    j = max(1, int(round(target ** (1.0 / den))))
    while (j + 1) ** den <= target:
        j += 1
    while j > 1 and j**den > target:
        j -= 1
    return min(j, n)
