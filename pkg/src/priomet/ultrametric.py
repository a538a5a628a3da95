"""Probabilistic embedding into ultrametrics with prioritized distortion.

A hierarchical random partition: at level i every point joins the cluster of
the first point in a block-structured random permutation that lies within a
random radius beta * 2^(i-2). High-priority points occupy the early blocks
of the permutation, so in expectation the distortion of a pair scales with
the log of its higher-priority endpoint's rank rather than with log n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import MetricSpace, PriorityRanking, QueryError, StretchReport, seeded_rng
from .core.stretch import StretchBucket


def block_of_rank(h: int) -> int:
    """Block index: ranks 1,2 -> 0; block j holds ranks 2^(2^(j-1)) < h <= 2^(2^j)."""
    if h <= 2:
        return 0
    j = 1
    while h > 2 ** (2**j):
        j += 1
    return j


def priority_blocks(n: int) -> list:
    """Rank blocks as lists of ranks (1-based), highest priority first."""
    blocks = []
    hi = 0
    j = 0
    while hi < n:
        lo = hi + 1
        hi = min(n, 2 if j == 0 else 2 ** (2**j))
        blocks.append(list(range(lo, hi + 1)))
        j += 1
    return blocks


@dataclass
class PriorityPermutation:
    """Permutation uniformly random inside each priority block."""

    order: np.ndarray      # position (0-based) -> vertex id
    position: np.ndarray   # vertex id -> position
    block_of_vertex: np.ndarray

    @property
    def n(self) -> int:
        return len(self.order)


def sample_priority_permutation(r: PriorityRanking, seed) -> PriorityPermutation:
    n = r.n
    rng = seeded_rng(seed) if isinstance(seed, int) else seed
    order = []
    block_of_vertex = np.empty(n, dtype=np.int64)
    for b, ranks in enumerate(priority_blocks(n)):
        members = np.array([r.vertex_of(k) for k in ranks])
        block_of_vertex[members] = b
        order.extend(members[rng.permutation(len(members))].tolist())
    order = np.array(order, dtype=np.int64)
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(n)
    return PriorityPermutation(order, position, block_of_vertex)


@dataclass
class LevelTrace:
    """Per-level partition record used for invariant checks."""

    level: int
    settler: np.ndarray   # point -> center that first covered it at this level
    labels: np.ndarray    # point -> cluster id at this level


@dataclass
class Ultrametric:
    """Rooted labeled tree whose leaf distances are the labels of LCAs."""

    n: int
    scale: float
    delta: int
    node_label: list            # node id -> label (0.0 for leaves)
    node_parent: list           # node id -> parent id (-1 for root)
    leaf_node: list             # point id -> leaf node id
    permutation: PriorityPermutation
    beta: float
    levels: list = field(repr=False)       # list[LevelTrace], top to bottom
    _dt: np.ndarray = field(default=None, repr=False, compare=False)

    def distance_matrix(self) -> np.ndarray:
        if self._dt is None:
            n = self.n
            depth = {}

            def node_depth(x):
                d = 0
                while self.node_parent[x] != -1:
                    x = self.node_parent[x]
                    d += 1
                return d

            for i in range(len(self.node_label)):
                depth[i] = node_depth(i)
            D = np.zeros((n, n))
            for u in range(n):
                for v in range(u + 1, n):
                    D[u, v] = D[v, u] = self._lca_label(u, v, depth)
            self._dt = D
        return self._dt

    def _lca_label(self, u: int, v: int, depth) -> float:
        a, b = self.leaf_node[u], self.leaf_node[v]
        da, db = depth[a], depth[b]
        while da > db:
            a = self.node_parent[a]
            da -= 1
        while db > da:
            b = self.node_parent[b]
            db -= 1
        while a != b:
            a = self.node_parent[a]
            b = self.node_parent[b]
        return self.node_label[a]

    def to_json_dict(self) -> dict:
        return {
            "schema": "priomet.ultrametric.v1",
            "n": self.n,
            "scale": self.scale,
            "delta": self.delta,
            "beta": self.beta,
            "labels": [float(x) for x in self.node_label],
            "parents": [int(x) for x in self.node_parent],
            "leaves": [int(x) for x in self.leaf_node],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def ultra_distance(t: Ultrametric, u: int, v: int) -> float:
    """Label of the least common ancestor of leaves u and v."""
    if not (0 <= u < t.n and 0 <= v < t.n):
        raise QueryError(f"unknown leaf id in ({u}, {v})")
    if u == v:
        return 0.0
    depth = {}

    def d_of(x):
        d = 0
        y = x
        while t.node_parent[y] != -1:
            y = t.node_parent[y]
            d += 1
        return d

    a, b = t.leaf_node[u], t.leaf_node[v]
    da, db = d_of(a), d_of(b)
    while da > db:
        a, da = t.node_parent[a], da - 1
    while db > da:
        b, db = t.node_parent[b], db - 1
    while a != b:
        a, b = t.node_parent[a], t.node_parent[b]
    return t.node_label[a]


def build_frt_tree(m: MetricSpace, r: PriorityRanking, seed) -> Ultrametric:
    """One sample of the hierarchical random partition.

    The metric is rescaled so its minimum positive distance is 1; output
    labels carry the scale back. Level-i clusters have diameter at most 2^i
    and refine the level-(i+1) clusters; a pair separated at level i gets
    tree distance 2^(i+1) (times the scale). `seed` is an int or a tuple of
    ints (sub-stream key).
    """
    n = m.n
    key = seed if isinstance(seed, tuple) else (seed,)
    if n == 1:
        perm = sample_priority_permutation(r, seeded_rng(*key))
        return Ultrametric(1, 1.0, 0, [0.0], [-1], [0], perm, 1.0, [])
    scale = m.min_positive()
    Ds = m.dist / scale
    diam = float(Ds.max())
    delta = 0
    while 2.0**delta < diam:
        delta += 1

    rng = seeded_rng(*key)
    perm = sample_priority_permutation(r, rng)
    beta = float(2.0 ** rng.random())  # density 1/(x ln 2) on [1, 2]

    pos = perm.position
    labels = np.zeros(n, dtype=np.int64)
    levels = []
    i = delta - 1
    while True:
        _, counts = np.unique(labels, return_counts=True)
        if counts.max() <= 1:
            break
        beta_i = beta * 2.0 ** (i - 2)
        within = Ds < beta_i
        masked = np.where(within, pos[None, :], n)
        settler_pos = masked.min(axis=1)
        settler = perm.order[settler_pos]  # every point covers itself, so < n
        key = labels * n + settler_pos
        _, new_labels = np.unique(key, return_inverse=True)
        levels.append(LevelTrace(i, settler.copy(), new_labels.copy()))
        labels = new_labels
        i -= 1

    node_label, node_parent, leaf_node = _tree_from_levels(n, scale, delta, levels)
    return Ultrametric(n, scale, delta, node_label, node_parent, leaf_node,
                       perm, beta, levels)


def _tree_from_levels(n: int, scale: float, delta: int, levels: list):
    """Collapse the laminar level structure into an explicit labeled tree.

    A cluster node's label is 2^(level of the deepest partition in which it
    still appears unsplit); chains of unsplit clusters are collapsed so LCA
    labels match the partition semantics.
    """
    node_label = [scale * 2.0**delta]
    node_parent = [-1]
    leaf_node = [-1] * n
    # current node id per point; -1 once the point's leaf is attached
    cur = np.zeros(n, dtype=np.int64)
    if not levels:
        # single point
        for p in range(n):
            leaf_node[p] = 0
        return node_label, node_parent, leaf_node
    for trace in levels:
        lvl = trace.level
        groups = {}
        for p in range(n):
            if leaf_node[p] == -1:
                groups.setdefault((int(cur[p]), int(trace.labels[p])), []).append(p)
        by_parent = {}
        for (parent_node, lab), pts in groups.items():
            by_parent.setdefault(parent_node, []).append((lab, pts))
        for parent_node, children in sorted(by_parent.items()):
            children.sort(key=lambda c: min(c[1]))
            if len(children) == 1:
                # unsplit: slide the node's label down to this level
                node_label[parent_node] = scale * 2.0**lvl
                continue
            for _, pts in children:
                if len(pts) == 1:
                    nid = len(node_label)
                    node_label.append(0.0)
                    node_parent.append(parent_node)
                    leaf_node[pts[0]] = nid
                else:
                    nid = len(node_label)
                    node_label.append(scale * 2.0**lvl)
                    node_parent.append(parent_node)
                    for p in pts:
                        cur[p] = nid
    # points still unattached (possible only if loop ended with singletons
    # produced exactly at the last recorded level) — attach as leaves
    for p in range(n):
        if leaf_node[p] == -1:
            nid = len(node_label)
            node_label.append(0.0)
            node_parent.append(int(cur[p]))
            leaf_node[p] = nid
    return node_label, node_parent, leaf_node


def frt_distance_matrix(t: Ultrametric) -> np.ndarray:
    """Pairwise tree distances straight from the level traces (vectorized)."""
    n = t.n
    if n == 1:
        return np.zeros((1, 1))
    D = np.full((n, n), t.scale * 2.0**t.delta)
    np.fill_diagonal(D, 0.0)
    prev = np.zeros(n, dtype=np.int64)
    for trace in t.levels:
        same_parent = prev[:, None] == prev[None, :]
        diff_child = trace.labels[:, None] != trace.labels[None, :]
        cut = same_parent & diff_child
        D[cut] = t.scale * 2.0 ** (trace.level + 1)
        prev = trace.labels
    return D


def check_settling_monotonicity(t: Ultrametric) -> bool:
    """No pair is cut by a point from a later block than its better endpoint.

    The cutter of a pair at its cut level is the earlier (by permutation
    position) of the two settlers.
    """
    n = t.n
    blocks = t.permutation.block_of_vertex
    pos = t.permutation.position
    prev = np.zeros(n, dtype=np.int64)
    pair_block = np.minimum(blocks[:, None], blocks[None, :])
    for trace in t.levels:
        same_parent = prev[:, None] == prev[None, :]
        diff_child = trace.labels[:, None] != trace.labels[None, :]
        cut = same_parent & diff_child
        if cut.any():
            sp = pos[trace.settler]
            cutter_pos = np.minimum(sp[:, None], sp[None, :])
            cutter = t.permutation.order[cutter_pos]
            if np.any(blocks[cutter][cut] > pair_block[cut]):
                return False
        prev = trace.labels
    return True


def check_laminar_diameters(t: Ultrametric, m: MetricSpace) -> bool:
    """Level-i clusters have diameter <= 2^i and refine level i+1."""
    Ds = m.dist / t.scale
    prev = np.zeros(t.n, dtype=np.int64)
    for trace in t.levels:
        same = trace.labels[:, None] == trace.labels[None, :]
        if np.any(same & (Ds > 2.0**trace.level * (1 + 1e-9))):
            return False
        if np.any(same & (prev[:, None] != prev[None, :])):
            return False
        prev = trace.labels
    return True


def estimate_expected_distortion(
    m: MetricSpace, r: PriorityRanking, samples: int, seed: int
) -> StretchReport:
    """Average d_T/d per pair over independent samples, bucketed by rank."""
    n = m.n
    acc = np.zeros((n, n))
    min_ratio = np.inf
    for k in range(samples):
        t = build_frt_tree(m, r, seed=(seed, k))
        Dt = frt_distance_matrix(t)
        acc += Dt
        iu, ju = np.triu_indices(n, k=1)
        min_ratio = min(min_ratio, float((Dt[iu, ju] / m.dist[iu, ju]).min()))
    acc /= samples
    iu, ju = np.triu_indices(n, k=1)
    ratios = acc[iu, ju] / m.dist[iu, ju]
    jmin = np.minimum(r.rank_by_vertex[iu], r.rank_by_vertex[ju])
    buckets = []
    k = 0
    while 2**k <= max(n - 1, 1):
        lo, hi = 2**k, min(2 ** (k + 1) - 1, n)
        mask = (jmin >= lo) & (jmin <= hi)
        if mask.any():
            sel = ratios[mask]
            buckets.append(StretchBucket(lo, hi, int(mask.sum()),
                                         float(sel.max()), float(sel.mean())))
        k += 1
    return StretchReport(
        structure="frt-expected-distortion",
        params={"samples": samples, "min_sample_ratio": min_ratio},
        seed=seed,
        size_words=3 * (n - 1),
        buckets=buckets,
        global_max=float(ratios.max()) if len(ratios) else 1.0,
    )
