"""
Tests for the per-component counting statistics
"""
import numpy as np
import pytest

from nr_simulator.core.components import bfs_layers, components
from nr_simulator.core.exceptions import ComponentTooLargeError, ParameterError
from nr_simulator.core.statistics import (
    brute_force_terminal_trees,
    count_statistic,
    count_terminal_trees,
    parse_statistic_spec,
    statistic_per_component,
)
from nr_simulator.core.trees import RootedTree, all_rooted_trees
from nr_simulator.core.weights import WeightVector
from nr_simulator.models.schemas import StatisticSpec
from nr_simulator.tests.conftest import make_graph, random_multigraph, unit_weights

WEDGE = RootedTree.parse("0 1 1")
SINGLE = RootedTree.parse("0")


def spec(text):
    return parse_statistic_spec(text)


class TestSpecParsing:

    @pytest.mark.parametrize("text, label", [
        ("all", "all"),
        ("distance:2", "distance:2"),
        ("degree:1", "degree:1"),
        ("tree:0 1 1", "tree:(()())"),
        ("tree:(()())", "tree:(()())"),
    ])
    def test_labels(self, text, label):
        assert spec(text).label == label

    @pytest.mark.parametrize("text", ["distance", "distance:0", "degree:x", "tree:0 0", "cycles:3"])
    def test_rejects(self, text):
        with pytest.raises(ParameterError):
            spec(text)

    def test_model_validation(self):
        with pytest.raises(ValueError):
            StatisticSpec(kind="all", m=2)


class TestBranchingTree:

    def test_terminal_wedges(self, branching_tree):
        g, _, view = branching_tree
        assert count_statistic(g, view, 0, spec("tree:0 1 1")) == 2
        assert brute_force_terminal_trees(g, 0, WEDGE) == 2

    def test_terminal_single_vertices_are_leaves(self, branching_tree):
        g, _, view = branching_tree
        assert count_statistic(g, view, 0, spec("tree:0")) == 7
        assert brute_force_terminal_trees(g, 0, SINGLE) == 7

    def test_other_statistics(self, branching_tree):
        g, _, view = branching_tree
        assert count_statistic(g, view, 0, spec("all")) == 12
        assert count_statistic(g, view, 0, spec("distance:1")) == 4
        assert count_statistic(g, view, 0, spec("distance:2")) == 5
        assert count_statistic(g, view, 0, spec("distance:3")) == 2
        assert count_statistic(g, view, 0, spec("degree:1")) == 7
        assert count_statistic(g, view, 0, spec("degree:3")) == 3

    def test_counts_depend_on_the_start_vertex(self, branching_tree):
        g, _, view = branching_tree
        # From leaf 10 the part below 9 holds everything but 10; only 3 still roots a wedge
        assert count_statistic(g, view, 10, spec("tree:0 1 1")) == 1
        assert brute_force_terminal_trees(g, 10, WEDGE) == 1


class TestSmallGraphs:

    def test_isolated_vertex(self):
        g = make_graph(3, [(1, 2)])
        view = components(g, unit_weights(3))
        assert count_statistic(g, view, 0, spec("all")) == 1
        assert count_statistic(g, view, 0, spec("tree:0")) == 0
        assert brute_force_terminal_trees(g, 0, SINGLE) == 0
        assert count_statistic(g, view, 0, spec("degree:1")) == 0

    def test_single_vertex_graph_has_no_terminal_trees(self):
        g = make_graph(1, [])
        view = components(g, unit_weights(1))
        leaves = count_statistic(g, view, 0, spec("degree:1"))
        terminal = count_statistic(g, view, 0, spec("tree:0"))
        assert leaves == terminal + (1 if g.degree(0) == 1 else 0) == 0
        assert list(statistic_per_component(g, view, spec("tree:0"))) == [0]

    def test_path(self):
        g = make_graph(3, [(0, 1), (1, 2)])
        view = components(g, unit_weights(3))
        assert count_statistic(g, view, 0, spec("tree:0")) == 1
        assert brute_force_terminal_trees(g, 0, SINGLE) == 1

    def test_triangle_has_no_terminal_trees(self):
        g = make_graph(3, [(0, 1), (1, 2), (2, 0)])
        view = components(g, unit_weights(3))
        for m in range(1, 4):
            for tree in all_rooted_trees(m):
                assert count_terminal_trees(g, view, 0, tree) == 0
                assert brute_force_terminal_trees(g, 0, tree) == 0

    def test_multi_edges_and_loops_are_ignored(self):
        g = make_graph(3, [(0, 1), (0, 1), (1, 2), (2, 2)])
        view = components(g, unit_weights(3))
        assert count_statistic(g, view, 0, spec("tree:0")) == 1
        assert count_statistic(g, view, 0, spec("degree:2")) == 1

    def test_path_cap(self):
        g = make_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        view = components(g, unit_weights(5))
        with pytest.raises(ComponentTooLargeError):
            count_statistic(g, view, 0, spec("tree:0"), path_cap=4)
        # The cap only applies to terminal trees
        assert count_statistic(g, view, 0, spec("all"), path_cap=4) == 5


class TestOracles:

    def test_terminal_trees_match_brute_force(self):
        rng = np.random.default_rng(99)
        patterns = [tree for m in range(1, 5) for tree in all_rooted_trees(m)]
        for _ in range(1000):
            n = int(rng.integers(1, 13))
            g = random_multigraph(rng, n, mean_degree=float(rng.uniform(0.5, 2.5)))
            view = components(g, unit_weights(n))
            v = int(rng.integers(0, n))
            for tree in patterns:
                assert count_terminal_trees(g, view, v, tree) == brute_force_terminal_trees(g, v, tree)

    def test_distance_layers_add_up_to_component(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(1, 40))
            g = random_multigraph(rng, n)
            view = components(g, unit_weights(n))
            v = int(rng.integers(0, n))
            layers = bfs_layers(g, v)
            total = 1 + sum(count_statistic(g, view, v, spec(f"distance:{m}")) for m in range(1, n + 1))
            assert total == count_statistic(g, view, v, spec("all")) == len(layers)
            assert count_statistic(g, view, v, spec("distance:1")) == g.degree(v)

    def test_leaf_identity_on_tree_components(self):
        rng = np.random.default_rng(8)
        checked = 0
        for _ in range(500):
            n = int(rng.integers(2, 30))
            g = random_multigraph(rng, n, mean_degree=0.8)
            view = components(g, unit_weights(n))
            v = int(rng.integers(0, n))
            members = view.members_of(v)
            inner_edges = int(g.degrees()[members].sum()) // 2
            if inner_edges != members.size - 1:
                continue
            leaves = count_statistic(g, view, v, spec("degree:1"))
            terminal = count_statistic(g, view, v, spec("tree:0"))
            assert leaves == terminal + (1 if g.degree(v) == 1 else 0)
            checked += 1
        assert checked > 50


class TestPerComponent:

    def test_matches_single_vertex_counts(self):
        rng = np.random.default_rng(5)
        g = random_multigraph(rng, 60, mean_degree=1.2)
        weights = WeightVector(rng.random(60) + 0.5)
        view = components(g, weights)
        for text in ["all", "distance:2", "degree:1", "degree:2", "tree:0", "tree:0 1 1"]:
            values = statistic_per_component(g, view, spec(text))
            expected = [count_statistic(g, view, int(r), spec(text)) for r in view.representative]
            assert list(values) == expected
