"""Unified command-line entry point.

Subcommands: generate, embed-tree, embed-frt, embed-lp, build-oracle,
query-oracle, bench-oracle, build-labels, route-sim, bench. Reports are
JSON by default (--format csv writes the flat bucket table instead). Exit
code 0 iff every requested invariant check passed. PRIOMET_THREADS caps
parallel pair evaluation in batch measurements.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .core import (
    MetricSpace,
    PriometError,
    PriorityRanking,
    WeightedGraph,
    exact_distances,
    load_graph,
    load_metric,
    load_ranking,
    measure_prioritized_stretch,
    save_graph,
    save_metric,
    seeded_rng,
    shortest_path_forest,
)
from .embed_lp import (
    embed_prioritized_dimension,
    embed_prioritized_lp,
    measure_distortion,
)
from .labeling import (
    build_fully_prioritized_labels,
    build_prioritized_labels,
    build_tree_exact_labels,
    label_query,
)
from .oracle import (
    PrioritizedTZOracle,
    build_composed_oracle,
    build_tz_prioritized,
    preset,
    tz_query,
    tz_query_path,
    walk_length,
)
from .routing import build_general_routing, build_tree_routing, route_general, route_tree
from .tree_embed import (
    PriorityFunction,
    alpha_preset_eps,
    embed_single_tree,
)
from .ultrametric import build_frt_tree, estimate_expected_distortion, frt_distance_matrix

log = logging.getLogger("priomet")


# ---------------------------------------------------------------- generators

def generate_cycle(n: int) -> WeightedGraph:
    if n < 3:
        raise PriometError("cycle needs n >= 3")
    return WeightedGraph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))


def generate_path(n: int) -> WeightedGraph:
    if n < 2:
        raise PriometError("path needs n >= 2")
    return WeightedGraph(n, tuple((i, i + 1, 1.0) for i in range(n - 1)))


def generate_grid(a: int, b: int) -> WeightedGraph:
    if a < 1 or b < 1 or a * b < 2:
        raise PriometError("grid needs at least 2 vertices")
    edges = []
    for i in range(a):
        for j in range(b):
            v = i * b + j
            if j + 1 < b:
                edges.append((v, v + 1, 1.0))
            if i + 1 < a:
                edges.append((v, v + b, 1.0))
    return WeightedGraph(a * b, tuple(edges))


def generate_random_graph(
    n: int, p: float, seed: int, w_lo: float = 1.0, w_hi: float = 2.0,
    int_weights: bool = False,
) -> WeightedGraph:
    """G(n, p) unioned with a random spanning tree for connectivity."""
    if n < 2:
        raise PriometError("random graph needs n >= 2")
    rng = seeded_rng(seed)
    edges = set()
    perm = rng.permutation(n)
    for i in range(1, n):
        j = int(rng.integers(0, i))
        u, v = int(perm[i]), int(perm[j])
        edges.add((min(u, v), max(u, v)))
    coins = rng.random((n, n))
    for u in range(n):
        for v in range(u + 1, n):
            if coins[u, v] < p:
                edges.add((u, v))
    wrng = seeded_rng(seed, 1)
    out = []
    for u, v in sorted(edges):
        if int_weights:
            w = float(wrng.integers(int(w_lo), max(int(w_lo) + 1, int(w_hi) + 1)))
        else:
            w = w_lo + (w_hi - w_lo) * wrng.random()
        out.append((u, v, w))
    return WeightedGraph(n, tuple(out))


def generate_random_tree(n: int, seed: int, w_lo: float = 1.0, w_hi: float = 2.0) -> WeightedGraph:
    if n < 2:
        raise PriometError("random tree needs n >= 2")
    rng = seeded_rng(seed)
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        w = w_lo + (w_hi - w_lo) * rng.random()
        edges.append((u, v, w))
    return WeightedGraph(n, tuple(edges))


def generate_random_metric(n: int, seed: int) -> MetricSpace:
    """Euclidean distances of uniform points in the unit square."""
    if n < 2:
        raise PriometError("random metric needs n >= 2")
    rng = seeded_rng(seed)
    pts = rng.random((n, 2))
    D = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    D = (D + D.T) / 2.0
    np.fill_diagonal(D, 0.0)
    return MetricSpace(D)


# ------------------------------------------------------------------ plumbing

def _load_ranking_or_identity(path, n: int) -> PriorityRanking:
    if path is None:
        return PriorityRanking.identity(n)
    r = load_ranking(path)
    if r.n != n:
        raise PriometError(f"ranking size {r.n} does not match instance size {n}")
    return r


def _write_report(report, path, fmt: str) -> None:
    if path is None:
        return
    if fmt == "csv":
        report.write_csv(path)
    else:
        report.write_json(path)


def _write_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _pair_policy(spec: str, n: int, seed: int):
    """'all' (capped at n <= 1024) or 'random:K' ordered pairs."""
    if spec == "all":
        if n > 1024:
            raise PriometError("pair policy 'all' is capped at n <= 1024; use random:K")
        return [(u, v) for u in range(n) for v in range(n) if u != v]
    if spec.startswith("random:"):
        k = int(spec.split(":", 1)[1])
        rng = seeded_rng(seed, 0xBEEF)
        out = []
        while len(out) < k:
            u = int(rng.integers(0, n))
            v = int(rng.integers(0, n))
            if u != v:
                out.append((u, v))
        return out
    raise PriometError(f"unknown pair policy {spec!r}")


# -------------------------------------------------------------- subcommands

def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "cycle":
        g = generate_cycle(args.n)
    elif kind == "path":
        g = generate_path(args.n)
    elif kind == "grid":
        g = generate_grid(args.a, args.b)
    elif kind == "random-graph":
        g = generate_random_graph(args.n, args.p, args.seed, args.w_lo, args.w_hi,
                                  args.int_weights)
    elif kind == "random-tree":
        g = generate_random_tree(args.n, args.seed, args.w_lo, args.w_hi)
    elif kind == "random-metric":
        save_metric(generate_random_metric(args.n, args.seed), args.out)
        log.info("wrote metric to %s", args.out)
        return 0
    else:
        raise PriometError(f"unknown generator {kind!r}")
    save_graph(g, args.out)
    log.info("wrote graph (n=%d, m=%d) to %s", g.n, g.m, args.out)
    return 0


def _load_alpha(args, n: int) -> PriorityFunction:
    if args.alpha_file:
        vals = [float(x) for x in open(args.alpha_file).read().split()]
        return PriorityFunction.from_table(vals)
    return alpha_preset_eps(args.alpha_eps, max(n, 2))


def cmd_embed_tree(args) -> int:
    m = load_metric(args.metric)
    r = _load_ranking_or_identity(args.ranking, m.n)
    alpha = _load_alpha(args, m.n)
    tree = embed_single_tree(m, r, alpha)
    if args.out:
        _write_json(tree.to_json_dict(), args.out)
    DT = tree.distance_matrix()
    report = measure_prioritized_stretch(
        DT, m, r, structure="single-tree", seed=args.seed,
        params={"alpha": alpha.name}, size_words=3 * (m.n - 1),
    )
    _write_report(report, args.report, args.format)
    ranks = r.rank_by_vertex
    iu, ju = np.triu_indices(m.n, k=1)
    jmin = np.minimum(ranks[iu], ranks[ju])
    bounds = np.array([2.0 * alpha(int(j)) for j in jmin])
    ok = bool(np.all(DT[iu, ju] <= bounds * m.dist[iu, ju] * (1 + 1e-9)))
    ok &= report.violations == 0
    print(f"single-tree: global max stretch {report.global_max:.4f}; "
          f"prioritized bound {'ok' if ok else 'VIOLATED'}")
    return 0 if ok else 1


def cmd_embed_frt(args) -> int:
    m = load_metric(args.metric)
    r = _load_ranking_or_identity(args.ranking, m.n)
    report = estimate_expected_distortion(m, r, args.samples, args.seed)
    _write_report(report, args.report, args.format)
    if args.dump_tree:
        t = build_frt_tree(m, r, seed=(args.seed, 0))
        _write_json(t.to_json_dict(), args.dump_tree)
    ok = report.params["min_sample_ratio"] >= 1.0 - 1e-9
    print(f"frt: {args.samples} samples, domination "
          f"{'ok' if ok else 'VIOLATED'}; bucket means "
          + ", ".join(f"[{b.rank_lo},{b.rank_hi}]={b.mean_stretch:.2f}"
                      for b in report.buckets))
    return 0 if ok else 1


def cmd_embed_lp(args) -> int:
    m = load_metric(args.metric)
    r = _load_ranking_or_identity(args.ranking, m.n)
    p = math.inf if args.p in ("inf", "Inf", "INF") else float(args.p)
    if args.scheme == "prioritized":
        emb = embed_prioritized_lp(m, r, p=p, eps=args.eps, seed=args.seed)
    else:
        emb = embed_prioritized_dimension(m, r, p=p, seed=args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(emb.to_csv())
        _write_json(emb.sidecar_dict(), args.out + ".meta.json")
    rep = measure_distortion(emb, m, r)
    if args.report:
        _write_json(rep.to_dict(), args.report)
    ok = rep.nonexpansive_violations == 0
    print(f"embed-lp[{args.scheme}]: dim {emb.dim}, max expansion "
          f"{rep.global_max_expansion:.6f}, max contraction "
          f"{rep.global_max_contraction:.2f}, violations {rep.nonexpansive_violations}")
    return 0 if ok else 1


def cmd_build_oracle(args) -> int:
    g = load_graph(args.graph)
    r = _load_ranking_or_identity(args.ranking, g.n)
    o = build_tz_prioritized(g, r, args.t, args.seed)
    with open(args.out, "wb") as fh:
        fh.write(o.to_bytes())
    print(f"oracle: n={o.n} t={o.t} bunch entries={o.total_bunch_entries()} "
          f"size_words={o.size_words()} attempts={o.attempts} -> {args.out}")
    return 0


def cmd_query_oracle(args) -> int:
    with open(args.oracle, "rb") as fh:
        o = PrioritizedTZOracle.from_bytes(fh.read())
    est = tz_query(o, args.u, args.v)
    if args.path:
        path = tz_query_path(o, args.u, args.v)
        print(f"{est!r} {' '.join(str(x) for x in path)}")
    else:
        print(repr(est))
    return 0


def cmd_bench_oracle(args) -> int:
    g = load_graph(args.graph)
    r = _load_ranking_or_identity(args.ranking, g.n)
    truth = exact_distances(g)
    o = build_tz_prioritized(g, r, args.t, args.seed)
    report = measure_prioritized_stretch(
        lambda u, v: tz_query(o, u, v), truth, r,
        structure="tz-oracle", seed=args.seed,
        params={"t": args.t, "attempts": o.attempts},
        size_words=o.size_words(),
    )
    _write_report(report, args.report, args.format)
    ok = report.violations == 0
    worst_margin = 0.0
    for j in range(1, g.n + 1):
        bound = o.stretch_bound(j)
        v = r.vertex_of(j)
        for u in range(g.n):
            if u == v:
                continue
            est = tz_query(o, u, v)
            jm = min(j, r.rank_of(u))
            b = o.stretch_bound(jm)
            worst_margin = max(worst_margin, est / truth.dist[u, v] - b)
    ok &= worst_margin <= 1e-9
    print(f"bench-oracle: global max stretch {report.global_max:.4f}, "
          f"bound margin {worst_margin:.2e}, violations {report.violations}")
    return 0 if ok else 1


def cmd_build_labels(args) -> int:
    g = load_graph(args.graph)
    r = _load_ranking_or_identity(args.ranking, g.n)
    truth = exact_distances(g)
    invariants_ok = True
    if args.scheme == "prioritized":
        sch = build_prioritized_labels(g, r, args.t, args.seed)
        est = lambda u, v: label_query(sch.label_of(u), sch.label_of(v), sch.t)
        sizes = {v: sch.label_of(v).size_words() for v in range(g.n)}
        extra = {"t": args.t, "attempts": sch.attempts, "a_last": sch.a_last_size}
        out_dict = sch.to_json_dict()
    elif args.scheme == "fully":
        sch = build_fully_prioritized_labels(g, r, args.t, args.seed)
        est = sch.query
        sizes = {v: sch.label_of(v).size_words() for v in range(g.n)}
        extra = {"t": args.t, "stretch_bound": sch.stretch_bound()}
        out_dict = {
            "schema": "priomet.labels.v1",
            "scheme": "fully",
            "n": g.n,
            "t": args.t,
            "sizes": [sizes[v] for v in range(g.n)],
        }
    elif args.scheme == "tree-exact":
        sch = build_tree_exact_labels(g, r)
        est = sch.query
        sizes = {v: sch.label_of(v).size_words() for v in range(g.n)}
        extra = {"phase_levels": sch.phase_levels}
        out_dict = {
            "schema": "priomet.labels.v1",
            "scheme": "tree-exact",
            "n": g.n,
            "labels": [
                {"vertex": v,
                 "entries": [[int(s), float(d)] for s, d in sch.label_of(v).entries]}
                for v in range(g.n)
            ],
        }
        for u in range(g.n):
            for v in range(g.n):
                if abs(sch.query(u, v) - truth.dist[u, v]) > 1e-9 * max(1.0, truth.dist[u, v]):
                    invariants_ok = False
    else:
        raise PriometError(f"unknown labeling scheme {args.scheme!r}")
    report = measure_prioritized_stretch(
        est, truth, r, structure=f"labels-{args.scheme}", seed=args.seed,
        params=extra, size_words=sum(sizes.values()),
    )
    invariants_ok &= report.violations == 0
    if args.out:
        _write_json(out_dict, args.out)
    _write_report(report, args.report, args.format)
    print(f"labels[{args.scheme}]: global max stretch {report.global_max:.4f}, "
          f"total size {sum(sizes.values())} words, "
          f"invariants {'ok' if invariants_ok else 'VIOLATED'}")
    return 0 if invariants_ok else 1


def cmd_route_sim(args) -> int:
    g = load_graph(args.graph)
    r = _load_ranking_or_identity(args.ranking, g.n)
    truth = exact_distances(g)
    pairs = _pair_policy(args.pairs, g.n, args.seed)
    per_rank = {}
    if g.is_tree() and args.tree_only:
        sch = build_tree_routing(g, r, root=0)
        sizes = {
            "table_words": sch.table_words(),
            "label_words": sum(sch.labels[v].size_words() for v in range(g.n)),
        }
        delivered = 0
        for s, v in pairs:
            hops = route_tree(sch, s, sch.labels[v])
            if hops[-1] == v:
                delivered += 1
            length = sum(g.adjacency()[a][[x for x, _ in g.adjacency()[a]].index(b)][1]
                         for a, b in zip(hops, hops[1:]))
            jd = r.rank_of(v)
            entry = per_rank.setdefault(jd, [0.0, 0])
            entry[0] = max(entry[0], length / truth.dist[s, v] if s != v else 1.0)
            entry[1] += 1
        ok = delivered == len(pairs)
    else:
        sch = build_general_routing(g, r, args.t, args.seed)
        sizes = {
            "table_words_max": max(sch.table_words(v) for v in range(g.n)),
            "label_words_max": max(sch.label_of(v).size_words() for v in range(g.n)),
        }
        delivered = 0
        ok = True
        for s, v in pairs:
            rec = route_general(sch, s, sch.label_of(v))
            if rec.delivered:
                delivered += 1
            j = r.rank_of(v)
            stretch = rec.length / truth.dist[s, v] if s != v else 1.0
            bound = max(1, 4 * (args.t - int(sch.start_level[v])) - 3)
            if stretch > bound * (1 + 1e-9):
                ok = False
            entry = per_rank.setdefault(j, [0.0, 0])
            entry[0] = max(entry[0], stretch)
            entry[1] += 1
        ok &= delivered == len(pairs)
    out = {
        "schema": "priomet.routesim.v1",
        "structure": "tree-routing" if (g.is_tree() and args.tree_only) else "general-routing",
        "params": {"t": args.t, "pairs": args.pairs},
        "seed": args.seed,
        "delivered": delivered,
        "pairs": len(pairs),
        "sizes": sizes,
        "per_destination_rank": {
            str(j): {"max_stretch": v[0], "pairs": v[1]}
            for j, v in sorted(per_rank.items())
        },
    }
    if args.report:
        _write_json(out, args.report)
    print(f"route-sim: delivered {delivered}/{len(pairs)}, "
          f"invariants {'ok' if ok else 'VIOLATED'}")
    return 0 if ok else 1


@dataclass
class BenchConfig:
    structure: str
    graph: str | None
    metric: str | None
    ranking: str | None
    t: int
    p: str
    eps: float
    samples: int
    preset: int
    seed: int
    pairs: str
    report: str | None
    fmt: str


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        structure=args.structure, graph=args.graph, metric=args.metric,
        ranking=args.ranking, t=args.t, p=args.p, eps=args.eps,
        samples=args.samples, preset=args.preset, seed=args.seed,
        pairs=args.pairs, report=args.report, fmt=args.format,
    )
    return run_bench(cfg)


def run_bench(cfg: BenchConfig) -> int:
    """Build the requested structure, measure it, and check its invariants."""
    if cfg.structure in ("oracle", "composed", "labels-prioritized",
                         "labels-fully", "labels-tree-exact", "routing-general"):
        g = load_graph(cfg.graph)
        r = _load_ranking_or_identity(cfg.ranking, g.n)
        truth = exact_distances(g)
        n = g.n
    else:
        m = load_metric(cfg.metric)
        r = _load_ranking_or_identity(cfg.ranking, m.n)
        truth = m
        n = m.n

    checks = {}
    if cfg.structure == "oracle":
        o = build_tz_prioritized(g, r, cfg.t, cfg.seed)
        est = lambda u, v: tz_query(o, u, v)
        size = o.size_words()
        checks["size_cap"] = o.total_bunch_entries() <= 4.0 * cfg.t * n ** (1 + 1.0 / cfg.t)
        sample = _pair_policy("random:200", n, cfg.seed)
        replay_ok = True
        for u, v in sample:
            pth = tz_query_path(o, u, v)
            replay_ok &= abs(walk_length(g, pth) - tz_query(o, u, v)) <= 1e-9
        checks["path_replay"] = replay_ok
    elif cfg.structure == "composed":
        fn = preset(cfg.preset, n)
        co = build_composed_oracle(g, r, fn, cfg.seed)
        est = co.query
        size = co.size_words_total
        iu, ju = np.triu_indices(n, k=1)
        ok = True
        for u, v in zip(iu.tolist(), ju.tolist()):
            j = min(r.rank_of(u), r.rank_of(v))
            if co.query(u, v) > co.stretch_bound(j) * truth.dist[u, v] * (1 + 1e-9):
                ok = False
        checks["composed_bound"] = ok
    elif cfg.structure == "labels-prioritized":
        sch = build_prioritized_labels(g, r, cfg.t, cfg.seed)
        est = lambda u, v: label_query(sch.label_of(u), sch.label_of(v), sch.t)
        size = sch.size_words()
        checks["top_level_cap"] = sch.a_last_size <= 8.0 * n ** (1.0 / cfg.t)
    elif cfg.structure == "labels-fully":
        sch = build_fully_prioritized_labels(g, r, cfg.t, cfg.seed)
        est = sch.query
        size = sum(sch.label_of(v).size_words() for v in range(n))
        iu, ju = np.triu_indices(n, k=1)
        vals = np.array([sch.query(u, v) for u, v in zip(iu.tolist(), ju.tolist())])
        checks["fixed_stretch"] = bool(
            np.all(vals <= sch.stretch_bound() * truth.dist[iu, ju] * (1 + 1e-9))
        )
    elif cfg.structure == "labels-tree-exact":
        sch = build_tree_exact_labels(g, r)
        est = sch.query
        size = sch.size_words()
        iu, ju = np.triu_indices(n, k=1)
        vals = np.array([sch.query(u, v) for u, v in zip(iu.tolist(), ju.tolist())])
        checks["exactness"] = bool(
            np.all(np.abs(vals - truth.dist[iu, ju]) <= 1e-9 * np.maximum(1.0, vals))
        )
    elif cfg.structure == "routing-general":
        sch = build_general_routing(g, r, cfg.t, cfg.seed)
        size = sum(sch.table_words(v) for v in range(n))

        def est(u, v):
            return route_general(sch, u, sch.label_of(v)).length

        checks["routing_build"] = True
    elif cfg.structure == "tree-embed":
        alpha = alpha_preset_eps(cfg.eps if 0 < cfg.eps < 0.5 else 0.25, max(n, 2))
        tree = embed_single_tree(truth, r, alpha)
        DT = tree.distance_matrix()
        est = DT
        size = 3 * (n - 1)
        iu, ju = np.triu_indices(n, k=1)
        jmin = np.minimum(r.rank_by_vertex[iu], r.rank_by_vertex[ju])
        bounds = np.array([2.0 * alpha(int(j)) for j in jmin])
        checks["prioritized_bound"] = bool(
            np.all(DT[iu, ju] <= bounds * truth.dist[iu, ju] * (1 + 1e-9))
        )
    elif cfg.structure == "frt":
        rep = estimate_expected_distortion(truth, r, cfg.samples, cfg.seed)
        _write_report(rep, cfg.report, cfg.fmt)
        ok = rep.params["min_sample_ratio"] >= 1.0 - 1e-9
        print(f"bench[frt]: domination {'ok' if ok else 'VIOLATED'}")
        return 0 if ok else 1
    elif cfg.structure in ("lp", "lp-dim"):
        p = math.inf if cfg.p == "inf" else float(cfg.p)
        if cfg.structure == "lp":
            emb = embed_prioritized_lp(truth, r, p=p, eps=cfg.eps, seed=cfg.seed)
        else:
            emb = embed_prioritized_dimension(truth, r, p=p, seed=cfg.seed)
        rep = measure_distortion(emb, truth, r)
        if cfg.report:
            _write_json(rep.to_dict(), cfg.report)
        ok = rep.nonexpansive_violations == 0
        print(f"bench[{cfg.structure}]: non-expansive "
              f"{'ok' if ok else 'VIOLATED'}, dim {emb.dim}")
        return 0 if ok else 1
    else:
        raise PriometError(f"unknown bench structure {cfg.structure!r}")

    report = measure_prioritized_stretch(
        est, truth, r, structure=cfg.structure, seed=cfg.seed,
        params={"t": cfg.t}, size_words=size,
    )
    checks["non_contractive"] = report.violations == 0
    _write_report(report, cfg.report, cfg.fmt)
    ok = all(checks.values())
    summary = ", ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in checks.items())
    print(f"bench[{cfg.structure}]: {summary}; global max stretch "
          f"{report.global_max:.4f}")
    return 0 if ok else 1


# ----------------------------------------------------------------- argparse

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="priomet",
                                  description="prioritized metric structures")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--verbose", action="store_true")
        return sp

    sp = common(sub.add_parser("generate", help="write instance files"))
    sp.add_argument("kind", choices=("cycle", "path", "grid", "random-graph",
                                     "random-tree", "random-metric"))
    sp.add_argument("--n", type=int, default=16)
    sp.add_argument("--a", type=int, default=4)
    sp.add_argument("--b", type=int, default=4)
    sp.add_argument("--p", type=float, default=0.1)
    sp.add_argument("--w-lo", type=float, default=1.0)
    sp.add_argument("--w-hi", type=float, default=2.0)
    sp.add_argument("--int-weights", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_generate)

    sp = common(sub.add_parser("embed-tree", help="single-tree embedding"))
    sp.add_argument("--metric", required=True)
    sp.add_argument("--ranking")
    sp.add_argument("--alpha-eps", type=float, default=0.25)
    sp.add_argument("--alpha-file")
    sp.add_argument("--out")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_embed_tree)

    sp = common(sub.add_parser("embed-frt", help="random ultrametric embedding"))
    sp.add_argument("--metric", required=True)
    sp.add_argument("--ranking")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--report")
    sp.add_argument("--dump-tree")
    sp.set_defaults(func=cmd_embed_frt)

    sp = common(sub.add_parser("embed-lp", help="normed-space embeddings"))
    sp.add_argument("--metric", required=True)
    sp.add_argument("--ranking")
    sp.add_argument("--p", default="2")
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--scheme", choices=("prioritized", "prioritized-dim"),
                    default="prioritized")
    sp.add_argument("--out")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_embed_lp)

    sp = common(sub.add_parser("build-oracle", help="build and serialize the oracle"))
    sp.add_argument("--graph", required=True)
    sp.add_argument("--ranking")
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_build_oracle)

    sp = common(sub.add_parser("query-oracle", help="query a serialized oracle"))
    sp.add_argument("--oracle", required=True)
    sp.add_argument("--u", type=int, required=True)
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--path", action="store_true")
    sp.set_defaults(func=cmd_query_oracle)

    sp = common(sub.add_parser("bench-oracle", help="exhaustive oracle check"))
    sp.add_argument("--graph", required=True)
    sp.add_argument("--ranking")
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_bench_oracle)

    sp = common(sub.add_parser("build-labels", help="distance labeling schemes"))
    sp.add_argument("--graph", required=True)
    sp.add_argument("--ranking")
    sp.add_argument("--scheme", choices=("prioritized", "fully", "tree-exact"),
                    default="prioritized")
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--out")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_build_labels)

    sp = common(sub.add_parser("route-sim", help="hop-by-hop routing simulation"))
    sp.add_argument("--graph", required=True)
    sp.add_argument("--ranking")
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--pairs", default="all")
    sp.add_argument("--tree-only", action="store_true",
                    help="use pure tree routing (graph must be a tree)")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_route_sim)

    sp = common(sub.add_parser("bench", help="generic build+measure+check"))
    sp.add_argument("--structure", required=True,
                    choices=("oracle", "composed", "labels-prioritized",
                             "labels-fully", "labels-tree-exact",
                             "routing-general", "tree-embed", "frt", "lp", "lp-dim"))
    sp.add_argument("--graph")
    sp.add_argument("--metric")
    sp.add_argument("--ranking")
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--p", default="2")
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--preset", type=int, default=2)
    sp.add_argument("--pairs", default="all")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_bench)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except PriometError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
