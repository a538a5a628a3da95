"""Prioritized stretch measurement and reporting.

A pair (x_j, x_i) with j < i is attributed to rank j (its higher-priority
endpoint); pairs are aggregated into rank buckets [2^k, 2^(k+1)).
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metric import MetricSpace
from .ranking import PriorityRanking

REL_TOL = 1e-9
REPORT_SCHEMA = "priomet.report.v1"


def max_threads() -> int:
    """Parallelism cap for batch pair evaluation (env PRIOMET_THREADS)."""
    raw = os.environ.get("PRIOMET_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class StretchBucket:
    rank_lo: int
    rank_hi: int
    pairs: int
    max_stretch: float
    mean_stretch: float


@dataclass
class StretchReport:
    structure: str
    params: dict
    seed: int | None
    size_words: int
    buckets: list
    global_max: float
    violations: int = 0
    worst_violation: float = 1.0  # smallest estimate/truth ratio observed

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "structure": self.structure,
            "params": self.params,
            "seed": self.seed,
            "size_words": self.size_words,
            "buckets": [
                {
                    "rank_lo": b.rank_lo,
                    "rank_hi": b.rank_hi,
                    "pairs": b.pairs,
                    "max_stretch": b.max_stretch,
                    "mean_stretch": b.mean_stretch,
                }
                for b in self.buckets
            ],
            "global_max": self.global_max,
            "violations": self.violations,
            "worst_violation": self.worst_violation,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["structure", "seed", "size_words", "rank_lo", "rank_hi",
                 "pairs", "max_stretch", "mean_stretch", "global_max"]
            )
            for b in self.buckets:
                writer.writerow(
                    [self.structure, self.seed, self.size_words, b.rank_lo,
                     b.rank_hi, b.pairs, b.max_stretch, b.mean_stretch,
                     self.global_max]
                )


def pair_estimates(estimate, n: int) -> np.ndarray:
    """Materialize an n-by-n estimate matrix from a matrix or a callable."""
    if isinstance(estimate, np.ndarray):
        return estimate
    iu, ju = np.triu_indices(n, k=1)
    out = np.zeros((n, n))
    pairs = list(zip(iu.tolist(), ju.tolist()))
    workers = max_threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(lambda p: estimate(p[0], p[1]), pairs))
    else:
        vals = [estimate(u, v) for u, v in pairs]
    out[iu, ju] = vals
    out[ju, iu] = vals
    return out


def measure_prioritized_stretch(
    estimate,
    truth: MetricSpace,
    ranking: PriorityRanking,
    non_contractive: bool = True,
    structure: str = "",
    params: dict | None = None,
    seed: int | None = None,
    size_words: int = 0,
) -> StretchReport:
    """Compare a pairwise estimate against the exact metric, per rank bucket.

    `estimate` is an n-by-n matrix or a callable (u, v) -> float defined on
    all pairs. When the structure's contract is non-contractive, any
    estimate < truth beyond tolerance is flagged as an invariant violation.
    """
    n = truth.n
    E = pair_estimates(estimate, n)
    D = truth.dist
    iu, ju = np.triu_indices(n, k=1)
    ratios = E[iu, ju] / D[iu, ju]
    jmin = np.minimum(ranking.rank_by_vertex[iu], ranking.rank_by_vertex[ju])

    violations = 0
    worst = 1.0
    if non_contractive and len(ratios):
        bad = ratios < 1.0 - REL_TOL
        violations = int(bad.sum())
        worst = float(min(1.0, ratios.min()))

    buckets = []
    global_max = float(ratios.max()) if len(ratios) else 1.0
    k = 0
    while 2**k <= max(n - 1, 1):
        lo, hi = 2**k, min(2 ** (k + 1) - 1, n)
        mask = (jmin >= lo) & (jmin <= hi)
        if mask.any():
            sel = ratios[mask]
            buckets.append(
                StretchBucket(lo, hi, int(mask.sum()), float(sel.max()), float(sel.mean()))
            )
        k += 1
    return StretchReport(
        structure=structure,
        params=params or {},
        seed=seed,
        size_words=size_words,
        buckets=buckets,
        global_max=global_max,
        violations=violations,
        worst_violation=worst,
    )


def rank_bucket(j: int) -> int:
    """Bucket index k with 2^k <= j < 2^(k+1)."""
    return int(math.floor(math.log2(j)))
