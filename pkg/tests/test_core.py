import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from priomet.cli import generate_random_graph
from priomet.core import (
    DisconnectedGraphError,
    GraphFormatError,
    MetricSpace,
    NegativeWeightError,
    NonMetricError,
    PriorityRanking,
    SelfLoopError,
    WeightedGraph,
    exact_distances,
    load_graph,
    load_metric,
    load_ranking,
    measure_prioritized_stretch,
    save_graph,
    save_metric,
    save_ranking,
    seeded_rng,
)
from priomet.oracle import build_tz_prioritized, tz_query


def write(tmp_path, text):
    p = tmp_path / "g.txt"
    p.write_text(text)
    return p


class TestLoadGraph:
    def test_path_graph(self, tmp_path):
        g = load_graph(write(tmp_path, "3 2\n0 1 1.0\n1 2 2.0"))
        assert g.n == 3 and g.m == 2
        assert g.edges[1] == (1, 2, 2.0)

    def test_self_loop_rejected(self, tmp_path):
        with pytest.raises(SelfLoopError):
            load_graph(write(tmp_path, "2 2\n0 1 1.0\n0 0 1.0"))

    def test_cycle_file(self, tmp_path):
        lines = ["8 8"] + [f"{i} {(i + 1) % 8} 1.0" for i in range(8)]
        g = load_graph(write(tmp_path, "\n".join(lines)))
        assert g.n == 8 and g.m == 8

    def test_malformed_line(self, tmp_path):
        with pytest.raises(GraphFormatError):
            load_graph(write(tmp_path, "2 1\n0 1"))

    def test_negative_weight(self, tmp_path):
        with pytest.raises(NegativeWeightError):
            load_graph(write(tmp_path, "2 1\n0 1 -3.0"))

    def test_disconnected(self, tmp_path):
        with pytest.raises(DisconnectedGraphError):
            load_graph(write(tmp_path, "4 2\n0 1 1.0\n2 3 1.0"))

    def test_comments_ignored(self, tmp_path):
        g = load_graph(write(tmp_path, "# header\n2 1\n0 1 1.5 # edge\n"))
        assert g.edges == ((0, 1, 1.5),)

    def test_roundtrip(self, tmp_path):
        g = generate_random_graph(12, 0.3, seed=2)
        save_graph(g, tmp_path / "r.txt")
        g2 = load_graph(tmp_path / "r.txt")
        assert g2.edges == g.edges


def min_plus_closure(g: WeightedGraph) -> np.ndarray:
    """Independent all-pairs oracle: repeated min-plus matrix squaring."""
    D = np.full((g.n, g.n), np.inf)
    np.fill_diagonal(D, 0.0)
    for u, v, w in g.edges:
        D[u, v] = min(D[u, v], w)
        D[v, u] = min(D[v, u], w)
    for _ in range(int(np.ceil(np.log2(max(g.n, 2)))) + 1):
        D = np.minimum(D, (D[:, :, None] + D[None, :, :]).min(axis=1))
    return D


class TestExactDistances:
    def test_weighted_path(self):
        g = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 2.0)))
        assert exact_distances(g).dist[0, 2] == 3.0

    def test_unit_cycle(self):
        g = WeightedGraph(8, tuple((i, (i + 1) % 8, 1.0) for i in range(8)))
        assert exact_distances(g).dist[0, 4] == 4.0

    def test_against_min_plus_closure(self):
        g = generate_random_graph(32, 0.3, seed=3, int_weights=True,
                                  w_lo=1, w_hi=1)
        got = exact_distances(g).dist
        want = min_plus_closure(g)
        assert np.allclose(got, want, rtol=0, atol=0)

    def test_metric_axioms(self):
        m = exact_distances(generate_random_graph(24, 0.2, seed=4))
        D = m.dist
        assert np.all(np.diagonal(D) == 0)
        assert np.allclose(D, D.T)
        for k in range(m.n):
            assert np.all(D <= D[:, k, None] + D[None, k, :] + 1e-9 * np.maximum(D, 1))


class TestMetricSpace:
    def test_rejects_triangle_violation(self):
        D = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
        with pytest.raises(NonMetricError):
            MetricSpace(D)

    def test_rejects_asymmetry(self):
        D = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(NonMetricError):
            MetricSpace(D)

    def test_file_roundtrip(self, tmp_path):
        m = exact_distances(generate_random_graph(10, 0.4, seed=6))
        save_metric(m, tmp_path / "m.txt")
        m2 = load_metric(tmp_path / "m.txt")
        assert np.array_equal(m.dist, m2.dist)


class TestRanking:
    def test_identity(self):
        r = PriorityRanking.identity(5)
        assert r.rank_of(0) == 1 and r.vertex_of(5) == 4

    def test_bijection_enforced(self):
        with pytest.raises(GraphFormatError):
            PriorityRanking(np.array([0, 0, 2]))

    def test_file_roundtrip(self, tmp_path):
        r = PriorityRanking.random(9, seed=1)
        save_ranking(r, tmp_path / "r.txt")
        r2 = load_ranking(tmp_path / "r.txt")
        assert np.array_equal(r.vertex_by_rank, r2.vertex_by_rank)

    @given(st.integers(min_value=1, max_value=64), st.integers())
    @settings(max_examples=30, deadline=None)
    def test_bijection_property(self, n, seed):
        r = PriorityRanking.random(n, seed=seed)
        for k in range(1, n + 1):
            assert r.rank_of(r.vertex_of(k)) == k


class TestSeededRng:
    def test_same_seed_same_stream(self):
        a = seeded_rng(0).random(16)
        b = seeded_rng(0).random(16)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        assert not np.array_equal(seeded_rng(0).random(16), seeded_rng(1).random(16))

    def test_subkeys_independent(self):
        assert not np.array_equal(seeded_rng(0, 1).random(8), seeded_rng(0, 2).random(8))


class TestMeasureStretch:
    def test_identity_estimate(self, small_graph):
        g, m = small_graph
        rep = measure_prioritized_stretch(m.dist.copy(), m,
                                          PriorityRanking.identity(g.n))
        assert rep.global_max == pytest.approx(1.0)
        assert all(b.mean_stretch == pytest.approx(1.0) for b in rep.buckets)
        assert rep.violations == 0

    def test_uniform_scaling(self, small_graph):
        g, m = small_graph
        rep = measure_prioritized_stretch(2.0 * m.dist, m,
                                          PriorityRanking.identity(g.n))
        assert rep.global_max == pytest.approx(2.0)
        assert all(b.max_stretch == pytest.approx(2.0) for b in rep.buckets)

    def test_contractive_estimate_flagged(self, small_graph):
        g, m = small_graph
        rep = measure_prioritized_stretch(0.5 * m.dist, m,
                                          PriorityRanking.identity(g.n))
        assert rep.violations > 0
        assert rep.worst_violation == pytest.approx(0.5)

    def test_tz_bucket_maxima(self, mid_graph):
        g, m = mid_graph
        r = PriorityRanking.identity(g.n)
        o = build_tz_prioritized(g, r, t=2, seed=0)
        rep = measure_prioritized_stretch(lambda u, v: tz_query(o, u, v), m, r,
                                          structure="tz", params={"t": 2})
        assert rep.violations == 0
        assert all(b.max_stretch <= 3.0 + 1e-9 for b in rep.buckets)

    def test_report_serialization(self, small_graph, tmp_path):
        g, m = small_graph
        rep = measure_prioritized_stretch(m.dist, m, PriorityRanking.identity(g.n),
                                          structure="x")
        rep.write_json(tmp_path / "rep.json")
        rep.write_csv(tmp_path / "rep.csv")
        data = (tmp_path / "rep.json").read_text()
        assert '"schema"' in data and '"buckets"' in data


@given(st.integers(min_value=2, max_value=20), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=25, deadline=None)
def test_exact_distances_triangle_property(n, seed):
    g = generate_random_graph(n, 0.3, seed=seed)
    D = exact_distances(g).dist
    assert np.allclose(D, D.T)
    for k in range(n):
        assert np.all(D <= D[:, k, None] + D[None, k, :] + 1e-9 * np.maximum(D, 1))
