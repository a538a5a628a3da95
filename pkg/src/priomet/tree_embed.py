"""Single-tree embedding with prioritized distortion.

The construction reweights the complete graph so that edges touching
high-priority points become relatively cheap to keep, takes a minimum
spanning tree of the reweighted graph, and restores the original metric
lengths. Admissible priority-distortion functions are exactly those whose
reciprocals sum to at most 1; for inadmissible functions a unit cycle
witness shows that no spanning tree works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import MetricSpace, PhiViolationError, PriorityRanking
from .core.errors import PriometError

PHI_BUDGET = 1.0


@dataclass
class PriorityFunction:
    """Non-decreasing positive distortion bound alpha(1..n).

    `values[j-1]` holds alpha(j). For closed forms, `formula` evaluates
    beyond the table and `tail_bound(n)` certifies an upper bound on
    sum_{i>n} 1/alpha(i); raw tables have no tail and their admissibility
    statement covers the tabulated range only.
    """

    values: np.ndarray
    formula: object = None          # optional callable j -> alpha(j)
    tail_bound: object = None       # optional callable n -> tail upper bound
    name: str = "table"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if np.any(self.values <= 0):
            raise PhiViolationError("alpha must be positive")
        if np.any(np.diff(self.values) < -1e-12 * np.abs(self.values[:-1])):
            raise PhiViolationError("alpha must be non-decreasing")

    def __call__(self, j: int) -> float:
        if j <= len(self.values):
            return float(self.values[j - 1])
        if self.formula is not None:
            return float(self.formula(j))
        raise IndexError(f"alpha({j}) outside table of length {len(self.values)}")

    @property
    def n(self) -> int:
        return len(self.values)

    @staticmethod
    def from_table(values, name: str = "table") -> "PriorityFunction":
        return PriorityFunction(np.asarray(values, dtype=np.float64), name=name)


@dataclass
class PhiReport:
    in_phi: bool
    partial_sums: np.ndarray
    tail: float
    total: float
    crossing_n: int | None  # first prefix length whose reciprocal sum exceeds 1


def validate_phi(alpha: PriorityFunction, n: int) -> PhiReport:
    """Check sum of 1/alpha(i) over i <= n (plus certified tail) against 1."""
    vals = np.array([alpha(j) for j in range(1, n + 1)])
    partial = np.cumsum(1.0 / vals)
    tail = float(alpha.tail_bound(n)) if alpha.tail_bound is not None else 0.0
    total = float(partial[-1]) + tail
    over = np.nonzero(partial > PHI_BUDGET)[0]
    crossing = int(over[0]) + 1 if len(over) else None
    return PhiReport(total <= PHI_BUDGET, partial, tail, total, crossing)


def alpha_preset_eps(eps: float, n: int) -> PriorityFunction:
    """The 1+eps family: alpha(1) = 1+eps, alpha(j) = j*(log2 j)^(1+eps)/c.

    The constant c is the largest making the reciprocal sum (head over
    j <= n plus an integral tail bound) equal to 1, so membership in the
    admissible family holds by construction.
    """
    if not 0 < eps < 0.5:
        raise PhiViolationError(f"eps must lie in (0, 1/2), got {eps}")
    if n < 2:
        raise PhiViolationError("preset needs n >= 2")
    js = np.arange(2, n + 1, dtype=np.float64)
    shape = js * np.log2(js) ** (1.0 + eps)
    head = float(np.sum(1.0 / shape))
    # 1/(x (log2 x)^(1+eps)) is decreasing, so the tail beyond n is at most
    # the integral from n to infinity: ln(2) / (eps * (log2 n)^eps).
    integral_tail = math.log(2) / (eps * math.log2(n) ** eps)
    # Largest admissible c, shaved by 1e-9 so float roundoff cannot push the
    # reciprocal sum past the budget.
    c = (eps / (1.0 + eps)) / (head + integral_tail) * (1.0 - 1e-9)
    values = np.empty(n)
    values[0] = 1.0 + eps
    values[1:] = shape / c

    recip_cum = np.cumsum(1.0 / values)
    full_head = float(recip_cum[-1])

    def formula(j: int) -> float:
        if j == 1:
            return 1.0 + eps
        return j * math.log2(j) ** (1.0 + eps) / c

    def tail_bound(m: int) -> float:
        # Certified bound on sum_{i>m} 1/alpha(i): the tabulated terms up to
        # the construction size, then the integral bound.
        beyond_table = c * math.log(2) / (eps * math.log2(n) ** eps)
        if m >= n:
            return c * math.log(2) / (eps * math.log2(m) ** eps)
        return (full_head - float(recip_cum[m - 1])) + beyond_table

    return PriorityFunction(values, formula=formula, tail_bound=tail_bound,
                            name=f"eps_preset({eps})")


@dataclass
class DominatingTree:
    """Spanning tree over the input points, edges carrying metric lengths."""

    n: int
    edges: tuple  # of (u, v, length)
    _adj: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.edges = tuple((int(u), int(v), float(w)) for u, v, w in self.edges)
        if len(self.edges) != self.n - 1:
            raise PriometError(f"tree needs n-1 edges, got {len(self.edges)}")

    def adjacency(self):
        if self._adj is None:
            adj = [[] for _ in range(self.n)]
            for u, v, w in self.edges:
                adj[u].append((v, w))
                adj[v].append((u, w))
            for lst in adj:
                lst.sort()
            self._adj = adj
        return self._adj

    def distance_matrix(self) -> np.ndarray:
        """All-pairs tree distances by one traversal per root."""
        n = self.n
        adj = self.adjacency()
        D = np.zeros((n, n))
        for root in range(n):
            stack = [root]
            seen = np.zeros(n, dtype=bool)
            seen[root] = True
            while stack:
                u = stack.pop()
                for v, w in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        D[root, v] = D[root, u] + w
                        stack.append(v)
        return D

    def to_json_dict(self) -> dict:
        return {
            "schema": "priomet.tree.v1",
            "n": self.n,
            "edges": [[u, v, w] for u, v, w in sorted(self.edges)],
        }


def _reweighted_mst(W: np.ndarray) -> list:
    """Dense Prim on a complete reweighted graph.

    Ties are broken by (min endpoint id, max endpoint id), which makes the
    tree unique and deterministic.
    """
    n = W.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best_w = W[0].copy()
    best_from = np.zeros(n, dtype=np.int64)
    in_tree[0] = True
    best_w[0] = np.inf
    edges = []
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best_w)
        order = np.lexsort((np.maximum(best_from, np.arange(n)),
                            np.minimum(best_from, np.arange(n)), cand))
        v = int(order[0])
        u = int(best_from[v])
        edges.append((min(u, v), max(u, v)))
        in_tree[v] = True
        better = (~in_tree) & (W[v] < best_w)
        best_w = np.where(better, W[v], best_w)
        best_from = np.where(better, v, best_from)
        # Equal-weight candidate edges: prefer lexicographically smaller pair.
        eq = (~in_tree) & (W[v] == best_w) & ~better
        if eq.any():
            idx = np.nonzero(eq)[0]
            for x in idx:
                old = (min(int(best_from[x]), int(x)), max(int(best_from[x]), int(x)))
                new = (min(v, int(x)), max(v, int(x)))
                if new < old:
                    best_from[x] = v
    return edges


def embed_single_tree(
    m: MetricSpace, r: PriorityRanking, alpha: PriorityFunction
) -> DominatingTree:
    """Build the dominating tree with prioritized distortion 2*alpha(j).

    Requires alpha in the admissible family (reciprocal sum <= 1); the edge
    {x_j, x_i} with j < i is weighted alpha(j)*d(x_j, x_i) before the MST.
    """
    n = m.n
    report = validate_phi(alpha, n)
    if not report.in_phi:
        raise PhiViolationError(
            f"alpha rejected: reciprocal sum {report.total:.6f} > 1 "
            f"(crossing at {report.crossing_n})"
        )
    if n == 1:
        return DominatingTree(1, ())
    ranks = r.rank_by_vertex
    avals = np.array([alpha(j) for j in range(1, n + 1)])
    amin = avals[np.minimum(ranks[:, None], ranks[None, :]) - 1]
    W = amin * m.dist
    np.fill_diagonal(W, np.inf)
    edges = _reweighted_mst(W)
    return DominatingTree(n, tuple((u, v, float(m.dist[u, v])) for u, v in edges))


@dataclass
class CycleWitness:
    """Exhaustive certificate that no spanning tree of C_n beats alpha."""

    n: int
    n_prime: int
    crossing_sum: float
    protected_radius: list       # a_i for i = 1..n_prime
    positions: list              # cycle position of x_i, i = 1..n_prime
    ranking: PriorityRanking
    rows: list                   # per removed edge: dict with violating pair
    all_violated: bool


def _find_crossing(alpha: PriorityFunction, limit: int = 1 << 20):
    total = 0.0
    j = 1
    while j <= limit:
        total += 1.0 / alpha(j)
        if total > PHI_BUDGET:
            return j, total
        j += 1
        if alpha.formula is None and j > alpha.n:
            break
    return None, total


def cycle_lower_bound_check(alpha: PriorityFunction, max_n: int = 200_000) -> CycleWitness:
    """Construct the unit-cycle witness and check every spanning tree.

    Places x_1..x_{n'} around C_n so that each x_i protects the 2*a_i edges
    within distance a_i = n/(alpha(i)+1) of it, the protected arcs tile the
    whole cycle, and therefore removing any edge distorts some protected
    pair by at least alpha(rank). Prefers n making every a_i integral.
    """
    n_prime, crossing_sum = _find_crossing(alpha)
    if n_prime is None:
        raise PhiViolationError(
            "alpha is admissible (reciprocal sum never exceeds 1); "
            "the single-tree upper bound applies and no witness exists"
        )
    avals = [alpha(i) for i in range(1, n_prime + 1)]
    fracs = [Fraction(a).limit_denominator(10**6) + 1 for a in avals]

    def placement(n: int, exact: bool):
        a = []
        for fr in fracs:
            if exact:
                num, den = fr.numerator, fr.denominator
                if (n * den) % num != 0:
                    return None
                a.append((n * den) // num)
            else:
                a.append(int(n / float(fr)))
        if any(x < 1 for x in a):
            return None
        pos = [0]
        for k in range(1, len(a)):
            nxt = pos[-1] + a[k - 1] + a[k]
            if pos[-1] + a[k - 1] >= n - a[0]:
                a = a[:k]
                break
            if nxt >= n:
                return None
            pos.append(nxt)
        covered = a[0] + pos[-1] + a[len(pos) - 1]
        if covered < n:
            return None
        return a[: len(pos)], pos

    chosen = None
    for exact in (True, False):
        limit = min(max_n, 200_000)
        n = n_prime + 1
        while n <= limit:
            got = placement(n, exact)
            if got is not None:
                chosen = (n, got[0], got[1])
                break
            n += 1
        if chosen:
            break
    if chosen is None:
        raise PriometError("no witness cycle size found within the search cap")
    n, a, pos = chosen

    # Ranking: x_1..x_k at the computed positions, remaining ranks filled in
    # increasing cycle position.
    used = set(pos)
    order = list(pos) + [p for p in range(n) if p not in used]
    ranking = PriorityRanking(np.array(order))

    idx = np.arange(n)
    gap = np.abs(idx[:, None] - idx[None, :])
    Dcyc = np.minimum(gap, n - gap).astype(np.float64)
    ranks = ranking.rank_by_vertex
    avals_n = np.array([alpha(j) for j in range(1, n + 1)])
    bound = avals_n[np.minimum(ranks[:, None], ranks[None, :]) - 1]
    iu, ju = np.triu_indices(n, k=1)

    rows = []
    all_violated = True
    for e in range(n):  # remove edge (e, e+1 mod n)
        line = (idx - (e + 1)) % n
        Dt = np.abs(line[:, None] - line[None, :]).astype(np.float64)
        ratio = Dt[iu, ju] / Dcyc[iu, ju]
        ok = ratio >= bound[iu, ju] * (1 - 1e-12)
        if ok.any():
            hits = np.nonzero(ok)[0]
            best = hits[np.argmax(ratio[hits])]
            u, v = int(iu[best]), int(ju[best])
            rows.append({
                "edge": (e, (e + 1) % n),
                "pair": (u, v),
                "rank": int(min(ranks[u], ranks[v])),
                "ratio": float(Dt[u, v] / Dcyc[u, v]),
                "alpha": float(bound[u, v]),
            })
        else:
            all_violated = False
            rows.append({"edge": (e, (e + 1) % n), "pair": None,
                         "rank": None, "ratio": None, "alpha": None})
    return CycleWitness(
        n=n,
        n_prime=len(pos),
        crossing_sum=crossing_sum,
        protected_radius=a,
        positions=pos,
        ranking=ranking,
        rows=rows,
        all_violated=all_violated,
    )
