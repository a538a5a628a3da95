import itertools
import math

import numpy as np
import pytest

from priomet.cli import generate_random_metric
from priomet.core import MetricSpace, PhiViolationError, PriorityRanking
from priomet.tree_embed import (
    CycleWitness,
    PriorityFunction,
    alpha_preset_eps,
    cycle_lower_bound_check,
    embed_single_tree,
    validate_phi,
)


def geometric_alpha(n):
    return PriorityFunction.from_table([2.0**j for j in range(1, n + 1)],
                                       name="2^j")


def loglog_alpha(n):
    """j * log2(j) * log2(log2(j)), guarded flat below j = 4."""
    vals = []
    for j in range(1, n + 1):
        if j < 4:
            jj = 4
        else:
            jj = j
        vals.append(jj * math.log2(jj) * math.log2(math.log2(jj)))
    return PriorityFunction(
        np.array(vals),
        formula=lambda j: (max(j, 4)) * math.log2(max(j, 4))
        * math.log2(math.log2(max(j, 4))),
        name="j*log*loglog",
    )


class TestValidatePhi:
    def test_geometric_in_family(self):
        rep = validate_phi(geometric_alpha(40), 40)
        assert rep.in_phi and rep.total <= 1.0

    def test_loglog_crosses(self):
        # The crossing point is found by direct summation: this family's
        # reciprocal sum diverges, so some finite prefix exceeds 1.
        alpha = loglog_alpha(4096)
        total, crossing = 0.0, None
        for j in range(1, 4097):
            total += 1.0 / alpha(j)
            if total > 1.0:
                crossing = j
                break
        assert crossing is not None
        rep = validate_phi(alpha, 4096)
        assert not rep.in_phi
        assert rep.crossing_n == crossing

    def test_constant_one_fails_at_two(self):
        alpha = PriorityFunction.from_table([1.0, 1.0])
        rep = validate_phi(alpha, 2)
        assert not rep.in_phi and rep.crossing_n == 2
        assert rep.partial_sums[-1] == pytest.approx(2.0)

    def test_partial_sums_reported(self):
        rep = validate_phi(geometric_alpha(8), 8)
        assert rep.partial_sums.shape == (8,)
        assert rep.partial_sums[0] == pytest.approx(0.5)


class TestAlphaPreset:
    def test_sum_at_most_one_by_direct_summation(self):
        alpha = alpha_preset_eps(0.25, 1024)
        total = sum(1.0 / alpha(j) for j in range(1, 1025))
        assert total <= 1.0

    def test_alpha1_exact(self):
        assert alpha_preset_eps(0.25, 64)(1) == 1.25
        assert alpha_preset_eps(0.4, 64)(1) == 1.4

    def test_nondecreasing(self):
        alpha = alpha_preset_eps(0.3, 512)
        vals = [alpha(j) for j in range(2, 513)]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_eps_range_enforced(self):
        with pytest.raises(PhiViolationError):
            alpha_preset_eps(0.7, 16)
        with pytest.raises(PhiViolationError):
            alpha_preset_eps(0.0, 16)


def tree_distance_matrix(n, edges):
    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    D = np.zeros((n, n))
    for root in range(n):
        seen = [False] * n
        seen[root] = True
        stack = [root]
        while stack:
            x = stack.pop()
            for y, w in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    D[root, y] = D[root, x] + w
                    stack.append(y)
    return D


class TestEmbedSingleTree:
    def test_two_points_forced(self):
        m = MetricSpace(np.array([[0.0, 3.0], [3.0, 0.0]]))
        t = embed_single_tree(m, PriorityRanking.identity(2), geometric_alpha(2))
        assert t.edges == ((0, 1, 3.0),)

    def test_uniform_metric_bound(self):
        n = 8
        D = np.ones((n, n)) - np.eye(n)
        m = MetricSpace(D)
        r = PriorityRanking.identity(n)
        alpha = alpha_preset_eps(0.25, n)
        t = embed_single_tree(m, r, alpha)
        DT = t.distance_matrix()
        for u, v in itertools.combinations(range(n), 2):
            j = min(u, v) + 1
            assert DT[u, v] <= 2.0 * alpha(j) * 1.0 + 1e-9
            assert DT[u, v] >= 1.0 - 1e-9

    def test_rejects_inadmissible(self):
        m = generate_random_metric(8, seed=1)
        with pytest.raises(PhiViolationError):
            embed_single_tree(m, PriorityRanking.identity(8),
                              PriorityFunction.from_table([1.0] * 8))

    def test_non_contractive(self, mid_metric):
        m = mid_metric
        r = PriorityRanking.random(m.n, seed=3)
        t = embed_single_tree(m, r, alpha_preset_eps(0.25, m.n))
        DT = t.distance_matrix()
        iu, ju = np.triu_indices(m.n, k=1)
        assert np.all(DT[iu, ju] >= m.dist[iu, ju] * (1 - 1e-9))

    def test_x1_pairs_small_distortion(self):
        # the eps-family promises 1 + 3*eps for every pair containing x_1
        eps = 0.25
        for seed in range(5):
            m = generate_random_metric(24, seed=seed)
            r = PriorityRanking.random(24, seed=seed + 100)
            t = embed_single_tree(m, r, alpha_preset_eps(eps, 24))
            DT = t.distance_matrix()
            x1 = r.vertex_of(1)
            for v in range(24):
                if v != x1:
                    assert DT[x1, v] <= (1 + 3 * eps) * m.dist[x1, v] * (1 + 1e-9)

    def test_mst_cycle_property(self, small_metric):
        # for every non-tree pair, every tree edge on its path is no heavier
        m = small_metric
        r = PriorityRanking.identity(m.n)
        alpha = alpha_preset_eps(0.3, m.n)
        t = embed_single_tree(m, r, alpha)
        avals = np.array([alpha(j) for j in range(1, m.n + 1)])
        ranks = r.rank_by_vertex
        W = avals[np.minimum(ranks[:, None], ranks[None, :]) - 1] * m.dist
        adj = [[] for _ in range(m.n)]
        for u, v, _ in t.edges:
            adj[u].append(v)
            adj[v].append(u)

        def path_edges(a, b):
            prev = {a: None}
            stack = [a]
            while stack:
                x = stack.pop()
                if x == b:
                    break
                for y in adj[x]:
                    if y not in prev:
                        prev[y] = x
                        stack.append(y)
            out = []
            x = b
            while prev[x] is not None:
                out.append((prev[x], x))
                x = prev[x]
            return out

        tree_pairs = {(min(u, v), max(u, v)) for u, v, _ in t.edges}
        for a, b in itertools.combinations(range(m.n), 2):
            if (a, b) in tree_pairs:
                continue
            for e in path_edges(a, b):
                assert W[e] <= W[a, b] + 1e-9 * max(W[a, b], 1.0)

    def test_mst_optimal_by_prufer_enumeration(self):
        # brute force over all n^(n-2) labeled trees at n = 7
        n = 7
        m = generate_random_metric(n, seed=8)
        r = PriorityRanking.random(n, seed=9)
        alpha = alpha_preset_eps(0.25, n)
        avals = np.array([alpha(j) for j in range(1, n + 1)])
        ranks = r.rank_by_vertex
        W = avals[np.minimum(ranks[:, None], ranks[None, :]) - 1] * m.dist
        t = embed_single_tree(m, r, alpha)
        got = sum(W[u, v] for u, v, _ in t.edges)

        def prufer_to_edges(seq):
            degree = [1] * n
            for x in seq:
                degree[x] += 1
            edges = []
            ptr = 0
            leaf = None
            seq = list(seq) + []
            deg = degree[:]
            import heapq
            leaves = [v for v in range(n) if deg[v] == 1]
            heapq.heapify(leaves)
            for x in seq:
                leaf = heapq.heappop(leaves)
                edges.append((leaf, x))
                deg[x] -= 1
                if deg[x] == 1:
                    heapq.heappush(leaves, x)
            u, v = heapq.heappop(leaves), heapq.heappop(leaves)
            edges.append((u, v))
            return edges

        best = math.inf
        for seq in itertools.product(range(n), repeat=n - 2):
            cost = sum(W[u, v] for u, v in prufer_to_edges(seq))
            best = min(best, cost)
        assert got == pytest.approx(best, rel=1e-12)


class TestCycleLowerBound:
    def test_constant_one_trivial_witness(self):
        wit = cycle_lower_bound_check(PriorityFunction.from_table([1.0] * 16))
        assert isinstance(wit, CycleWitness)
        assert wit.all_violated
        assert len(wit.rows) == wit.n

    def test_linear_alpha_exhaustive(self):
        alpha = PriorityFunction(np.arange(1.0, 65.0),
                                 formula=lambda j: float(j), name="j")
        wit = cycle_lower_bound_check(alpha)
        assert wit.all_violated
        # every removed edge has a recorded violating pair meeting its bound
        for row in wit.rows:
            assert row["pair"] is not None
            assert row["ratio"] >= row["alpha"] * (1 - 1e-12)

    def test_loglog_alpha_exhaustive(self):
        wit = cycle_lower_bound_check(loglog_alpha(64))
        assert wit.all_violated

    def test_admissible_alpha_rejected(self):
        with pytest.raises(PhiViolationError):
            cycle_lower_bound_check(geometric_alpha(64))

    def test_placement_matches_construction(self):
        alpha = PriorityFunction(np.arange(1.0, 65.0),
                                 formula=lambda j: float(j), name="j")
        wit = cycle_lower_bound_check(alpha)
        # x_1 sits at position 0 and successive centers advance by a_k + a_{k+1}
        assert wit.positions[0] == 0
        for k in range(1, len(wit.positions)):
            step = wit.protected_radius[k - 1] + wit.protected_radius[k]
            assert wit.positions[k] == wit.positions[k - 1] + step
