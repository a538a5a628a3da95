"""Prioritized Thorup-Zwick-style distance oracle with path reporting.

Levels 0..t-1 carry nested landmark sets: each level keeps the previous
level's landmarks with probability n^(-1/t)/2 and additionally forces the
top n^(1-i/t) ranked vertices in. A vertex stores its pivot (nearest
landmark) per level and a bunch of landmarks closer than the next level's
pivot; queries scan levels starting from the deepest level that contains
the higher-priority endpoint, which yields stretch 2*ceil(t*log j/log n)-1
for pairs whose better endpoint has rank j.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from ..core import (
    PriorityRanking,
    QueryError,
    RetryBudgetExceededError,
    WeightedGraph,
    seeded_rng,
    shortest_path_forest,
)

RETRY_BUDGET = 32
ORACLE_MAGIC = b"PTZO"
ORACLE_VERSION = 1


def rank_threshold(n: int, t: int, i: int) -> int:
    """Largest rank j with j^t <= n^(t-i), i.e. j <= n^(1-i/t) (exact)."""
    target = n ** (t - i)
    j = max(1, int(round(target ** (1.0 / t))))
    while (j + 1) ** t <= target:
        j += 1
    while j > 1 and j**t > target:
        j -= 1
    return j


def start_levels(n: int, t: int, ranking: PriorityRanking) -> np.ndarray:
    """Per-vertex deepest forced level: max i with rank <= n^(1-i/t)."""
    thresholds = [rank_threshold(n, t, i) for i in range(t)]
    out = np.zeros(n, dtype=np.int64)
    for v in range(n):
        j = ranking.rank_of(v)
        lvl = 0
        for i in range(t):
            if j <= thresholds[i]:
                lvl = i
        out[v] = lvl
    return out


def sample_nested_sets(base, t: int, rate: float, rng, forced=None):
    """Nested landmark levels A_0 .. A_{t-1} (sorted id arrays).

    A_0 = base; each later level keeps members independently with
    probability `rate` and unions in forced[i] when given.
    """
    sets = [np.sort(np.asarray(base, dtype=np.int64))]
    for i in range(1, t):
        prev = sets[-1]
        keep = prev[rng.random(len(prev)) < rate]
        if forced is not None:
            keep = np.union1d(keep, forced[i])
        sets.append(np.sort(keep))
    return sets


def compute_pivots(D: np.ndarray, a_sets, n: int, t: int):
    """Nearest landmark per level with deterministic, bunch-compatible ties.

    Rules, applied top level down: a vertex that is itself a landmark is its
    own pivot; if the level-(i+1) pivot already realizes d(v, A_i), it is
    inherited; otherwise the smallest-id minimizer is taken. These rules
    keep every pivot inside the vertex's bunch.
    """
    pivots = np.full((n, t), -1, dtype=np.int64)
    pivot_dist = np.full((n, t), np.inf)
    member = np.zeros((t, n), dtype=bool)
    for i in range(t):
        member[i, a_sets[i]] = True
    for i in range(t - 1, -1, -1):
        ai = a_sets[i]
        sub = D[:, ai]
        dmin = sub.min(axis=1)
        argmin = ai[np.argmin(sub, axis=1)]  # smallest id wins ties (ai sorted)
        for v in range(n):
            if member[i, v]:
                pivots[v, i] = v
                pivot_dist[v, i] = 0.0
            elif i + 1 < t and pivot_dist[v, i + 1] == dmin[v]:
                pivots[v, i] = pivots[v, i + 1]
                pivot_dist[v, i] = pivot_dist[v, i + 1]
            else:
                pivots[v, i] = argmin[v]
                pivot_dist[v, i] = dmin[v]
    return pivots, pivot_dist


def compute_bunches(D: np.ndarray, a_sets, pivot_dist: np.ndarray, n: int, t: int):
    """Per-vertex bunch: level-i landmarks strictly closer than the level-(i+1)
    pivot distance; the top level contributes all of its landmarks."""
    bunches = [dict() for _ in range(n)]
    for v in range(n):
        for i in range(t):
            ai = a_sets[i]
            if i + 1 < t:
                thr = pivot_dist[v, i + 1]
                sel = ai[D[v, ai] < thr]
            else:
                sel = ai
            bv = bunches[v]
            for w in sel.tolist():
                bv[w] = D[v, w]
    return bunches


@dataclass
class QueryView:
    """Everything the level-scan needs about one endpoint."""

    vertex: int
    start_level: int
    pivots: np.ndarray
    pivot_dist: np.ndarray
    bunch: dict  # landmark -> distance


def landmark_scan(hi: QueryView, lo: QueryView, t: int, trace=None):
    """The bidirectional level scan; hi must be the higher-priority endpoint.

    Scans from hi.start_level upward, swapping sides each iteration, until
    the current pivot w lands in the other side's bunch. Returns
    (estimate, w, holder-of-w-in-bunch, pivot-side, pivot distance) where
    estimate = d(w, u) + d(w, v). Float operations are fixed-order, so
    oracle and label queries agree bitwise.
    """
    i = hi.start_level
    vv, uu = hi, lo
    w = vv.vertex
    dwv = 0.0
    while w not in uu.bunch:
        i += 1
        if i >= t:
            raise QueryError("level scan ran past the top level (corrupt build)")
        vv, uu = uu, vv
        w = int(vv.pivots[i])
        dwv = float(vv.pivot_dist[i])
        if trace is not None:
            trace.append((i, vv.vertex, w, dwv))
    return float(uu.bunch[w]) + dwv, w, uu, vv, dwv


@dataclass
class PrioritizedTZOracle:
    n: int
    t: int
    seed: int
    ranking: PriorityRanking
    start_level: np.ndarray
    pivots: np.ndarray          # (n, t) landmark ids
    pivot_dist: np.ndarray      # (n, t)
    bunches: list               # v -> {w: (dist, next_hop_from_v_toward_w)}
    a_sets: list = field(repr=False)    # level landmark id arrays
    attempts: int = 1
    build_id: str = ""

    def __post_init__(self):
        if not self.build_id:
            h = hashlib.sha256()
            h.update(b"tz")
            h.update(struct.pack("<qqq", self.n, self.t, self.seed))
            h.update(self.ranking.vertex_by_rank.tobytes())
            self.build_id = h.hexdigest()[:16]

    def total_bunch_entries(self) -> int:
        return sum(len(b) for b in self.bunches)

    def size_words(self) -> int:
        """One word per stored id/distance: bunch entries cost 3 (id, dist,
        next hop), pivots 2, plus the n-word ranking."""
        return 3 * self.total_bunch_entries() + 2 * self.n * self.t + self.n

    def view(self, v: int) -> QueryView:
        return QueryView(
            vertex=v,
            start_level=int(self.start_level[v]),
            pivots=self.pivots[v],
            pivot_dist=self.pivot_dist[v],
            bunch=_DistView(self.bunches[v]),
        )

    def stretch_bound(self, j: int) -> int:
        """2*(t - start level of rank j) - 1, never below 1."""
        v = self.ranking.vertex_of(j)
        return max(1, 2 * (self.t - int(self.start_level[v])) - 1)

    def to_bytes(self) -> bytes:
        out = [ORACLE_MAGIC, struct.pack("<HIHq", ORACLE_VERSION, self.n, self.t, self.seed)]
        out.append(self.ranking.vertex_by_rank.astype("<u4").tobytes())
        for v in range(self.n):
            for i in range(self.t):
                out.append(struct.pack("<Id", int(self.pivots[v, i]),
                                       float(self.pivot_dist[v, i])))
        for v in range(self.n):
            items = sorted(self.bunches[v].items())
            out.append(struct.pack("<I", len(items)))
            for w, (d, nh) in items:
                out.append(struct.pack("<IdI", w, d, nh))
        return b"".join(out)

    @staticmethod
    def from_bytes(blob: bytes) -> "PrioritizedTZOracle":
        if blob[:4] != ORACLE_MAGIC:
            raise QueryError("bad oracle file magic")
        off = 4
        version, n, t, seed = struct.unpack_from("<HIHq", blob, off)
        off += struct.calcsize("<HIHq")
        if version != ORACLE_VERSION:
            raise QueryError(f"unsupported oracle version {version}")
        perm = np.frombuffer(blob, dtype="<u4", count=n, offset=off).astype(np.int64)
        off += 4 * n
        ranking = PriorityRanking(perm)
        pivots = np.empty((n, t), dtype=np.int64)
        pivot_dist = np.empty((n, t))
        for v in range(n):
            for i in range(t):
                pid, pd = struct.unpack_from("<Id", blob, off)
                off += struct.calcsize("<Id")
                pivots[v, i] = pid
                pivot_dist[v, i] = pd
        bunches = []
        for _ in range(n):
            (count,) = struct.unpack_from("<I", blob, off)
            off += 4
            b = {}
            for _ in range(count):
                w, d, nh = struct.unpack_from("<IdI", blob, off)
                off += struct.calcsize("<IdI")
                b[int(w)] = (float(d), int(nh))
            bunches.append(b)
        return PrioritizedTZOracle(
            n=n, t=t, seed=seed, ranking=ranking,
            start_level=start_levels(n, t, ranking),
            pivots=pivots, pivot_dist=pivot_dist, bunches=bunches, a_sets=[],
        )


class _DistView:
    """Read-only mapping view exposing only the distance of a bunch entry."""

    __slots__ = ("_d",)

    def __init__(self, d):
        self._d = d

    def __contains__(self, w):
        return w in self._d

    def __getitem__(self, w):
        return self._d[w][0]

    def __len__(self):
        return len(self._d)


def build_tz_prioritized(
    g: WeightedGraph,
    r: PriorityRanking | None = None,
    t: int = 2,
    seed: int = 0,
    *,
    dist=None,
    parents=None,
    retry_budget: int = RETRY_BUDGET,
) -> PrioritizedTZOracle:
    """Build the oracle, retrying until the measured size passes Markov.

    Accepts a build when the total number of bunch entries is at most
    4*t*n^(1+1/t) (twice the expectation). `dist`/`parents` may carry a
    precomputed all-sources shortest-path forest to share across builds.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    n = g.n
    if r is None:
        r = PriorityRanking.identity(n)
    if dist is None or parents is None:
        dist, parents = shortest_path_forest(g)
    forced = [r.top(rank_threshold(n, t, i)) for i in range(t)]
    rate = n ** (-1.0 / t) / 2.0
    cap = 4.0 * t * n ** (1.0 + 1.0 / t)
    for attempt in range(retry_budget):
        rng = seeded_rng(seed, attempt)
        a_sets = sample_nested_sets(np.arange(n), t, rate, rng, forced=forced)
        pivots, pivot_dist = compute_pivots(dist, a_sets, n, t)
        plain = compute_bunches(dist, a_sets, pivot_dist, n, t)
        total = sum(len(b) for b in plain)
        if total <= cap:
            bunches = []
            for v in range(n):
                bv = {}
                for w, d in plain[v].items():
                    nh = v if w == v else int(parents[w, v])
                    bv[w] = (float(d), nh)
                bunches.append(bv)
            return PrioritizedTZOracle(
                n=n, t=t, seed=seed, ranking=r,
                start_level=start_levels(n, t, r),
                pivots=pivots, pivot_dist=pivot_dist,
                bunches=bunches, a_sets=a_sets, attempts=attempt + 1,
            )
    raise RetryBudgetExceededError(
        f"no build within size cap {cap:.0f} after {retry_budget} attempts"
    )


def tz_query(o: PrioritizedTZOracle, u: int, v: int, trace=None) -> float:
    """Distance estimate; starts at the deeper endpoint's forced level."""
    if not (0 <= u < o.n and 0 <= v < o.n):
        raise QueryError(f"vertex out of range in query ({u}, {v})")
    if u == v:
        return 0.0
    if o.ranking.rank_of(u) <= o.ranking.rank_of(v):
        hi, lo = u, v
    else:
        hi, lo = v, u
    est, _, _, _, _ = landmark_scan(o.view(hi), o.view(lo), o.t, trace=trace)
    return est


def tz_query_path(o: PrioritizedTZOracle, u: int, v: int):
    """A u-v walk realizing exactly the estimate returned by tz_query."""
    if u == v:
        return [u]
    if o.ranking.rank_of(u) <= o.ranking.rank_of(v):
        hi, lo = u, v
    else:
        hi, lo = v, u
    est, w, uu, vv, _ = landmark_scan(o.view(hi), o.view(lo), o.t)
    left = _walk_to(o, uu.vertex, w)
    right = _walk_to(o, vv.vertex, w)
    path = left + right[::-1][1:]
    if path[0] != u:
        path.reverse()
    return path


def _walk_to(o: PrioritizedTZOracle, x: int, w: int):
    """Follow stored next hops from x to the landmark w."""
    chain = [x]
    z = x
    steps = 0
    while z != w:
        entry = o.bunches[z].get(w)
        if entry is None:
            raise QueryError(f"next-hop chain broken at {z} toward {w}")
        z = entry[1]
        chain.append(z)
        steps += 1
        if steps > o.n:
            raise QueryError("next-hop cycle detected")
    return chain


def walk_length(g: WeightedGraph, path) -> float:
    """Total weight of a vertex walk along graph edges."""
    wmap = {}
    for a, b, w in g.edges:
        wmap[(a, b)] = w
        wmap[(b, a)] = w
    total = 0.0
    for a, b in zip(path, path[1:]):
        if (a, b) not in wmap:
            raise QueryError(f"({a},{b}) is not a graph edge")
        total += wmap[(a, b)]
    return total
