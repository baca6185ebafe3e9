"""
Shared fixtures for the simulator tests
"""
import numpy as np
import pytest

from nr_simulator.core.components import components
from nr_simulator.core.graphgen import MultiGraph
from nr_simulator.core.weights import WeightVector
from nr_simulator.models.schemas import WeightModel

# v = 0 with children 1..4; 2 -> 5; 3 -> 6, 7; 4 -> 8, 9; 9 -> 10, 11
BRANCHING_TREE_EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4),
    (2, 5), (3, 6), (3, 7),
    (4, 8), (4, 9), (9, 10), (9, 11),
]


def make_graph(n, edges, label="NR"):
    """MultiGraph from (u, v) pairs; repeated pairs add multiplicity"""
    us = [u for u, _ in edges]
    vs = [v for _, v in edges]
    return MultiGraph.from_edges(n, us, vs, label=label)


def unit_weights(n):
    return WeightVector(np.ones(n))


@pytest.fixture
def model():
    """The default subcritical law beta = 3, t_min = 0.25"""
    return WeightModel(beta=3.0, t_min=0.25)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def branching_tree():
    """Tree with two terminal wedges (rooted at 3 and 9) seen from vertex 0"""
    g = make_graph(12, BRANCHING_TREE_EDGES)
    weights = WeightVector(np.r_[10.0, np.ones(11)])
    return g, weights, components(g, weights)


def random_multigraph(rng, n, mean_degree=1.5):
    """Small random multigraph with loops, for oracle comparisons"""
    edge_count = rng.poisson(mean_degree * n / 2)
    us = rng.integers(0, n, size=edge_count)
    vs = rng.integers(0, n, size=edge_count)
    return MultiGraph.from_edges(n, us, vs)
