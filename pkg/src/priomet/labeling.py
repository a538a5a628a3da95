"""Distance labeling schemes with prioritized stretch and/or size.

Four schemes:
  * prioritized labels: the landmark oracle distributed as labels, rebuilt
    until the per-vertex size events hold (top level at most 8n^(1/t),
    lower bunches of the rank-j vertex at most 16 n^(1/t) log j);
  * source-restricted labels: the landmark chain sampled from a subset S
    only, answering S x V with stretch 2t-1;
  * fully prioritized labels: fixed stretch 2t-1 with label size growing as
    j^(1/t) log j, by gluing the t=log n scheme (for the top 2^t ranks)
    with source-restricted schemes over geometric rank blocks;
  * exact tree labels via weighted-centroid separator phases, where phase i
    only tries to separate the i-th priority block.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .core import (
    NotATreeError,
    PriorityRanking,
    QueryError,
    RetryBudgetExceededError,
    WeightedGraph,
    exact_distances,
    seeded_rng,
    shortest_path_forest,
)
from .oracle.tz import (
    PrioritizedTZOracle,
    QueryView,
    compute_bunches,
    compute_pivots,
    landmark_scan,
    rank_threshold,
    sample_nested_sets,
    start_levels,
)
from .ultrametric import priority_blocks

LABEL_RETRY_BUDGET = 64


@dataclass
class VertexLabel:
    """One vertex's share of a landmark labeling."""

    vertex: int
    rank: int
    start_level: int
    pivots: np.ndarray
    pivot_dist: np.ndarray
    bunch: dict              # landmark -> distance
    build_id: str

    def size_words(self) -> int:
        """One word per stored id and per stored distance."""
        return 2 * len(self.bunch) + 2 * len(self.pivots)

    def view(self) -> QueryView:
        return QueryView(self.vertex, self.start_level, self.pivots,
                         self.pivot_dist, self.bunch)


@dataclass
class PrioritizedLabelScheme:
    n: int
    t: int
    seed: int
    ranking: PriorityRanking
    labels: list
    a_last_size: int
    attempts: int
    build_id: str
    oracle: PrioritizedTZOracle = field(repr=False, default=None)

    def label_of(self, v: int) -> VertexLabel:
        return self.labels[v]

    def size_words(self) -> int:
        return sum(lab.size_words() for lab in self.labels)

    def to_json_dict(self) -> dict:
        return {
            "schema": "priomet.labels.v1",
            "scheme": "prioritized",
            "n": self.n,
            "t": self.t,
            "seed": self.seed,
            "build_id": self.build_id,
            "labels": [
                {
                    "vertex": lab.vertex,
                    "rank": lab.rank,
                    "pivots": [[int(p), float(d)] for p, d in
                               zip(lab.pivots, lab.pivot_dist)],
                    "bunch": [[int(w), float(d)] for w, d in sorted(lab.bunch.items())],
                    "size_words": lab.size_words(),
                }
                for lab in self.labels
            ],
        }


def label_query(la: VertexLabel, lb: VertexLabel, t: int) -> float:
    """Alg-2 scan on two labels alone; identical output to the oracle query."""
    if la.build_id != lb.build_id:
        raise QueryError("labels come from different builds")
    if la.vertex == lb.vertex:
        return 0.0
    hi, lo = (la, lb) if la.rank <= lb.rank else (lb, la)
    est, _, _, _, _ = landmark_scan(hi.view(), lo.view(), t)
    return est


def _build_id(tag: bytes, n: int, t: int, seed: int, ranking: PriorityRanking) -> str:
    h = hashlib.sha256()
    h.update(tag)
    h.update(struct.pack("<qqq", n, t, seed))
    h.update(ranking.vertex_by_rank.tobytes())
    return h.hexdigest()[:16]


def build_prioritized_labels(
    g: WeightedGraph,
    r: PriorityRanking | None = None,
    t: int = 2,
    seed: int = 0,
    *,
    forest=None,
    retry_budget: int = LABEL_RETRY_BUDGET,
) -> PrioritizedLabelScheme:
    """Landmark labels, rebuilt until both size events hold.

    Event one: the top landmark level has at most 8 n^(1/t) members. Event
    two: for every rank j >= 2, the rank-j vertex's lower bunches hold at
    most 16 n^(1/t) log2(j) entries. Each attempt succeeds with probability
    at least 1/2, so the budget of 64 is generous.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    n = g.n
    if r is None:
        r = PriorityRanking.identity(n)
    if forest is None:
        forest = shortest_path_forest(g)
    dist, parents = forest
    forced = [r.top(rank_threshold(n, t, i)) for i in range(t)]
    rate = n ** (-1.0 / t) / 2.0
    cap_top = 8.0 * n ** (1.0 / t)
    lvl = start_levels(n, t, r)
    build_id = _build_id(b"labels", n, t, seed, r)
    for attempt in range(retry_budget):
        rng = seeded_rng(seed, attempt)
        a_sets = sample_nested_sets(np.arange(n), t, rate, rng, forced=forced)
        if len(a_sets[t - 1]) > cap_top:
            continue
        pivots, pivot_dist = compute_pivots(dist, a_sets, n, t)
        plain = compute_bunches(dist, a_sets, pivot_dist, n, t)
        top = len(a_sets[t - 1])
        ok = True
        for j in range(2, n + 1):
            v = r.vertex_of(j)
            lower = len(plain[v]) - top
            if lower > 16.0 * n ** (1.0 / t) * math.log2(j):
                ok = False
                break
        if not ok:
            continue
        labels = [
            VertexLabel(
                vertex=v,
                rank=r.rank_of(v),
                start_level=int(lvl[v]),
                pivots=pivots[v].copy(),
                pivot_dist=pivot_dist[v].copy(),
                bunch=dict(plain[v]),
                build_id=build_id,
            )
            for v in range(n)
        ]
        oracle_bunches = []
        for v in range(n):
            bv = {}
            for w, d in plain[v].items():
                bv[w] = (float(d), v if w == v else int(parents[w, v]))
            oracle_bunches.append(bv)
        oracle = PrioritizedTZOracle(
            n=n, t=t, seed=seed, ranking=r, start_level=lvl,
            pivots=pivots, pivot_dist=pivot_dist, bunches=oracle_bunches,
            a_sets=a_sets, attempts=attempt + 1,
        )
        return PrioritizedLabelScheme(
            n=n, t=t, seed=seed, ranking=r, labels=labels,
            a_last_size=top, attempts=attempt + 1, build_id=build_id,
            oracle=oracle,
        )
    raise RetryBudgetExceededError(
        f"label size events failed on all {retry_budget} attempts"
    )


@dataclass
class SourceRestrictedLabelScheme:
    """Labels answering S x V pairs with stretch 2t-1."""

    n: int
    t: int
    seed: int
    S: np.ndarray
    ranking: PriorityRanking
    labels: list
    in_S: np.ndarray
    attempts: int
    build_id: str

    def label_of(self, v: int) -> VertexLabel:
        return self.labels[v]

    def query_labels(self, la: VertexLabel, lb: VertexLabel) -> float:
        if la.build_id != lb.build_id:
            raise QueryError("labels come from different builds")
        if la.vertex == lb.vertex:
            return 0.0
        a_in, b_in = self.in_S[la.vertex], self.in_S[lb.vertex]
        if not a_in and not b_in:
            raise QueryError("source-restricted query with both endpoints outside S")
        if a_in and b_in:
            hi, lo = (la, lb) if la.rank <= lb.rank else (lb, la)
        else:
            hi, lo = (la, lb) if a_in else (lb, la)
        est, _, _, _, _ = landmark_scan(hi.view(), lo.view(), self.t)
        return est

    def query(self, v: int, u: int) -> float:
        return self.query_labels(self.labels[v], self.labels[u])

    def size_words(self) -> int:
        return sum(lab.size_words() for lab in self.labels)


def build_source_restricted_labels(
    g: WeightedGraph,
    S,
    t: int,
    r: PriorityRanking | None = None,
    seed: int = 0,
    *,
    forest=None,
    retry_budget: int = LABEL_RETRY_BUDGET,
    verify_stretch: bool = True,
) -> SourceRestrictedLabelScheme:
    """Landmark chain sampled from S only, at rate |S|^(-1/t).

    Rebuilds until every vertex x_j's bunch has at most
    |S|^(1/t) * (16 log2 j + 8) entries (8 |S|^(1/t) for j = 1) and then
    verifies the 2t-1 stretch exhaustively over S x V against the exact
    metric; a stretch failure signals a bug, not bad luck.
    """
    n = g.n
    if r is None:
        r = PriorityRanking.identity(n)
    S = np.sort(np.asarray(S, dtype=np.int64))
    if len(S) == 0:
        raise ValueError("S must be nonempty")
    if forest is None:
        forest = shortest_path_forest(g)
    dist, _ = forest
    s = len(S)
    rate = s ** (-1.0 / t)
    in_S = np.zeros(n, dtype=bool)
    in_S[S] = True
    build_id = _build_id(b"srlabels", n, t, seed, r) + f":{s}"
    for attempt in range(retry_budget):
        rng = seeded_rng(seed, attempt)
        a_sets = sample_nested_sets(S, t, rate, rng, forced=None)
        if len(a_sets[t - 1]) == 0:
            continue
        pivots, pivot_dist = compute_pivots(dist, a_sets, n, t)
        plain = compute_bunches(dist, a_sets, pivot_dist, n, t)
        ok = True
        for j in range(1, n + 1):
            v = r.vertex_of(j)
            cap = s ** (1.0 / t) * (16.0 * math.log2(j) + 8.0) if j >= 2 \
                else 8.0 * s ** (1.0 / t)
            if len(plain[v]) > cap:
                ok = False
                break
        if not ok:
            continue
        labels = [
            VertexLabel(
                vertex=v,
                rank=r.rank_of(v),
                start_level=0,
                pivots=pivots[v].copy(),
                pivot_dist=pivot_dist[v].copy(),
                bunch=dict(plain[v]),
                build_id=build_id,
            )
            for v in range(n)
        ]
        scheme = SourceRestrictedLabelScheme(
            n=n, t=t, seed=seed, S=S, ranking=r, labels=labels,
            in_S=in_S, attempts=attempt + 1, build_id=build_id,
        )
        if verify_stretch:
            bound = 2 * t - 1
            for v in S.tolist():
                row = dist[v]
                for u in range(n):
                    if u == v:
                        continue
                    est = scheme.query(v, u)
                    if not (row[u] - 1e-9 * max(row[u], 1.0) <= est
                            <= bound * row[u] * (1 + 1e-9)):
                        raise QueryError(
                            f"source-restricted stretch violated at ({v},{u}): "
                            f"{est} vs {row[u]} (bound {bound})"
                        )
        return scheme
    raise RetryBudgetExceededError(
        f"source-restricted size bound failed on all {retry_budget} attempts"
    )


@dataclass
class FullLabel:
    vertex: int
    rank: int
    block: int
    base: VertexLabel                 # the t = log n scheme's label
    restricted: dict                  # block index -> VertexLabel

    def size_words(self) -> int:
        return self.base.size_words() + sum(l.size_words()
                                            for l in self.restricted.values())


@dataclass
class FullyPrioritizedLabelScheme:
    """Fixed stretch 2t-1 with prioritized label size ~ j^(1/t) log j."""

    n: int
    t: int
    seed: int
    ranking: PriorityRanking
    base_scheme: PrioritizedLabelScheme
    restricted_schemes: dict          # block index -> SourceRestrictedLabelScheme
    labels: list

    def label_of(self, v: int) -> FullLabel:
        return self.labels[v]

    def query_labels(self, la: FullLabel, lb: FullLabel) -> float:
        if la.vertex == lb.vertex:
            return 0.0
        hi, lo = (la, lb) if la.rank <= lb.rank else (lb, la)
        if hi.block == 1:
            return label_query(hi.base, lo.base, self.base_scheme.t)
        scheme = self.restricted_schemes[hi.block]
        return scheme.query_labels(hi.restricted[hi.block], lo.restricted[hi.block])

    def query(self, u: int, v: int) -> float:
        return self.query_labels(self.labels[u], self.labels[v])

    def stretch_bound(self) -> int:
        return 2 * self.t - 1


def _full_block_of_rank(j: int, t: int) -> int:
    """Block 1 holds ranks <= 2^t; block i holds (2^((i-1)t), 2^(it)]."""
    if j <= 2**t:
        return 1
    return math.ceil(math.log2(j) / t)


def build_fully_prioritized_labels(
    g: WeightedGraph,
    r: PriorityRanking | None = None,
    t: int = 2,
    seed: int = 0,
    *,
    forest=None,
) -> FullyPrioritizedLabelScheme:
    if t < 1:
        raise ValueError("t must be >= 1")
    n = g.n
    if r is None:
        r = PriorityRanking.identity(n)
    if forest is None:
        forest = shortest_path_forest(g)
    t_base = max(1, math.ceil(math.log2(max(n, 2))))
    base = build_prioritized_labels(g, r, t_base, seed, forest=forest)
    blocks = {}
    for j in range(1, n + 1):
        blocks.setdefault(_full_block_of_rank(j, t), []).append(r.vertex_of(j))
    restricted = {}
    for i in sorted(blocks):
        if i == 1:
            continue
        restricted[i] = build_source_restricted_labels(
            g, np.array(blocks[i]), t, r, seed=seed * 257 + i, forest=forest,
            verify_stretch=False,
        )
    labels = []
    for v in range(n):
        j = r.rank_of(v)
        bi = _full_block_of_rank(j, t)
        mine = {}
        for i, scheme in restricted.items():
            if i <= bi:
                mine[i] = scheme.label_of(v)
        labels.append(FullLabel(v, j, bi, base.label_of(v), mine))
    return FullyPrioritizedLabelScheme(
        n=n, t=t, seed=seed, ranking=r, base_scheme=base,
        restricted_schemes=restricted, labels=labels,
    )


@dataclass
class SeparatorLabel:
    vertex: int
    entries: list          # [(separator vertex, exact distance)] in creation order
    lookup: dict = field(default=None, repr=False)

    def size_words(self) -> int:
        return 2 * len(self.entries)


@dataclass
class TreeExactLabelScheme:
    n: int
    ranking: PriorityRanking
    labels: list
    phase_levels: list     # levels actually used per phase

    def label_of(self, v: int) -> SeparatorLabel:
        return self.labels[v]

    def query(self, u: int, v: int) -> float:
        la, lb = self.labels[u], self.labels[v]
        if la.lookup is None:
            la.lookup = dict(la.entries)
        if lb.lookup is None:
            lb.lookup = dict(lb.entries)
        small, big = (la.lookup, lb.lookup) if len(la.lookup) <= len(lb.lookup) \
            else (lb.lookup, la.lookup)
        best = math.inf
        for sep, d in small.items():
            other = big.get(sep)
            if other is not None:
                best = min(best, d + other)
        if best is math.inf:
            raise QueryError(f"no common separator for ({u},{v}); corrupt build")
        return best

    def size_words(self) -> int:
        return sum(lab.size_words() for lab in self.labels)


def _weighted_centroid(comp, adj_alive, weight) -> int:
    """Vertex of the component minimizing the heaviest remaining part.

    For trees the minimum is at most half the total weight; ties go to the
    smallest id.
    """
    comp_set = set(comp)
    root = comp[0]
    order = [root]
    parent = {root: None}
    for x in order:
        for y in adj_alive(x):
            if y in comp_set and y not in parent:
                parent[y] = x
                order.append(y)
    sub = {x: float(weight(x)) for x in order}
    for x in reversed(order[1:]):
        sub[parent[x]] += sub[x]
    total = sub[root]
    best = None
    for x in order:
        heaviest = total - sub[x]
        for y in adj_alive(x):
            if y in comp_set and parent.get(y) == x:
                heaviest = max(heaviest, sub[y])
        key = (heaviest, x)
        if best is None or key < best:
            best = key
    heaviest, sep = best
    if total > 0 and heaviest > (2.0 / 3.0) * total + 1e-9:
        raise QueryError("separator quality bound violated (not a tree?)")
    return sep


def build_tree_exact_labels(
    g: WeightedGraph, r: PriorityRanking | None = None
) -> TreeExactLabelScheme:
    """Exact labels for trees via priority-phased centroid separators.

    Phase i runs at most 2^i + 1 levels; in each level every remaining
    component containing current-block vertices contributes one separator,
    and all member vertices of the component store the exact distance to it.
    After phase i no block-i vertex remains alive.
    """
    if not g.is_tree():
        raise NotATreeError("exact separator labels require a tree")
    n = g.n
    if r is None:
        r = PriorityRanking.identity(n)
    D = exact_distances(g).dist
    adj = g.adjacency()
    alive = np.ones(n, dtype=bool)
    labels = [SeparatorLabel(v, []) for v in range(n)]

    def adj_alive(x):
        return [y for y, _ in adj[x] if alive[y]]

    def components_with(members):
        seen = set()
        comps = []
        for m in members:
            if m in seen or not alive[m]:
                continue
            comp = [m]
            seen.add(m)
            for x in comp:
                for y in adj_alive(x):
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
            comps.append(comp)
        return comps

    phase_levels = []
    for i, ranks_block in enumerate(priority_blocks(n)):
        members = [r.vertex_of(k) for k in ranks_block]
        allowed = 2**i + 1
        used = 0
        for _ in range(allowed):
            live = [m for m in members if alive[m]]
            if not live:
                break
            used += 1
            in_block = np.zeros(n, dtype=bool)
            in_block[live] = True
            for comp in components_with(live):
                sep = _weighted_centroid(
                    comp, adj_alive, lambda x: 1.0 if in_block[x] else 0.0
                )
                for u in comp:
                    labels[u].entries.append((sep, float(D[sep, u])))
                alive[sep] = False
        if any(alive[m] for m in members):
            raise QueryError(
                f"phase {i} failed to eliminate its block within {allowed} levels"
            )
        phase_levels.append(used)
    return TreeExactLabelScheme(n=n, ranking=r, labels=labels,
                                phase_levels=phase_levels)
