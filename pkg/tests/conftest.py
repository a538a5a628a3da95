import numpy as np
import pytest

from priomet.cli import (
    generate_cycle,
    generate_random_graph,
    generate_random_metric,
    generate_random_tree,
)
from priomet.core import PriorityRanking, exact_distances


@pytest.fixture(scope="session")
def small_graph():
    """Random connected graph on 32 vertices with its exact metric."""
    g = generate_random_graph(32, 0.15, seed=7)
    return g, exact_distances(g)


@pytest.fixture(scope="session")
def mid_graph():
    g = generate_random_graph(64, 0.1, seed=11)
    return g, exact_distances(g)


@pytest.fixture(scope="session")
def small_metric():
    return generate_random_metric(32, seed=5)


@pytest.fixture(scope="session")
def mid_metric():
    return generate_random_metric(64, seed=9)


@pytest.fixture(scope="session")
def cycle32():
    g = generate_cycle(32)
    return g, exact_distances(g)


@pytest.fixture(scope="session")
def tree64():
    g = generate_random_tree(64, seed=13)
    return g, exact_distances(g)


def identity(n):
    return PriorityRanking.identity(n)


def all_pairs(n):
    iu, ju = np.triu_indices(n, k=1)
    return list(zip(iu.tolist(), ju.tolist()))
