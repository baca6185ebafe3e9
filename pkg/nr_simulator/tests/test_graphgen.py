"""
Tests for MultiGraph, the generators and edge-list files
"""
import math

import numpy as np
import pytest

from nr_simulator.core.exceptions import GraphInvariantError, ParameterError, VertexError
from nr_simulator.core.graphgen import (
    MultiGraph,
    audit,
    degree,
    edge_probability,
    erase,
    generate,
    generate_nr,
    generate_nr_naive,
    generate_simple,
    normalizing_constant,
    read_edge_list,
    read_weights,
    write_edge_list,
    write_weights,
)
from nr_simulator.core.sampling import AliasTable
from nr_simulator.core.weights import WeightVector, exp_moment, sample_weights
from nr_simulator.models.schemas import ModelKind
from nr_simulator.tests.conftest import make_graph


class TestMultiGraph:

    def test_multiplicities_and_loops(self):
        g = make_graph(3, [(0, 1), (1, 0), (2, 2), (1, 2)])
        assert g.multiplicity(0, 1) == 2
        assert g.multiplicity(1, 0) == 2
        assert g.multiplicity(2, 2) == 1
        assert g.multiplicity(0, 2) == 0
        assert g.edge_total == 4
        assert not g.is_simple
        audit(g)

    def test_degree_ignores_loops_and_multiplicity(self):
        g = make_graph(3, [(0, 1), (0, 1), (0, 0), (0, 2)])
        assert degree(g, 0) == 2
        assert list(g.degrees()) == [2, 1, 1]

    def test_vertex_out_of_range(self):
        g = make_graph(2, [(0, 1)])
        with pytest.raises(VertexError):
            g.neighbors(2)
        with pytest.raises(VertexError):
            make_graph(2, [(0, 5)])

    def test_erase_caps_multiplicity_and_drops_loops(self):
        g = make_graph(3, [(0, 1), (0, 1), (0, 1), (2, 2), (2, 2)])
        erased = erase(g)
        assert erased.multiplicity(0, 1) == 1
        assert erased.multiplicity(2, 2) == 0
        assert erased.n == 3
        assert erased.is_simple
        assert erased.label == "ENR"
        audit(erased)

    def test_audit_detects_asymmetry(self):
        broken = MultiGraph(
            2,
            indptr=np.array([0, 1, 1]),
            indices=np.array([1]),
            multiplicities=np.array([1]),
            loop_counts=np.zeros(2, dtype=np.int64),
        )
        with pytest.raises(GraphInvariantError):
            audit(broken)


class TestAliasTable:

    def test_encodes_distribution(self):
        weights = np.array([1.0, 2.0, 3.0, 0.0, 4.0])
        table = AliasTable(weights)
        np.testing.assert_allclose(table.probabilities(), weights / weights.sum(), atol=1e-12)

    def test_sample_frequencies(self):
        weights = np.array([0.1, 0.6, 0.3])
        draws = AliasTable(weights).sample(300_000, np.random.default_rng(3))
        frequencies = np.bincount(draws, minlength=3) / draws.size
        np.testing.assert_allclose(frequencies, weights, atol=4 * math.sqrt(0.25 / draws.size))

    def test_rejects_zero_total(self):
        with pytest.raises(ParameterError):
            AliasTable(np.zeros(3))


class TestEdgeProbability:

    def test_variants(self):
        p = np.array([0.5, 2.0])
        np.testing.assert_allclose(edge_probability(p, "ENR"), 1 - np.exp(-p))
        np.testing.assert_allclose(edge_probability(p, "CL"), [0.5, 1.0])
        np.testing.assert_allclose(edge_probability(p, "GRG"), p / (1 + p))

    def test_normalizers(self, model):
        weights = WeightVector([1.0, 2.0, 3.0])
        assert normalizing_constant(weights, "Ln") == 6.0
        assert normalizing_constant(weights, "nEW", model) == pytest.approx(3 * 0.375)
        with pytest.raises(ParameterError):
            normalizing_constant(weights, "nEW")


class TestGenerators:

    def test_nr_is_reproducible(self, model):
        weights = sample_weights(model, 500, np.random.default_rng(1))
        a = generate_nr(weights, "Ln", np.random.default_rng(9))
        b = generate_nr(weights, "Ln", np.random.default_rng(9))
        assert np.array_equal(a.indices, b.indices)
        assert np.array_equal(a.multiplicities, b.multiplicities)
        assert np.array_equal(a.loop_counts, b.loop_counts)
        audit(a)

    @pytest.mark.parametrize("kind", ["ENR", "CL", "GRG"])
    def test_simple_variants_have_no_loops(self, model, kind):
        weights = sample_weights(model, 2000, np.random.default_rng(2))
        g = generate_simple(weights, kind, "Ln", np.random.default_rng(4))
        assert g.is_simple
        assert g.label == kind
        audit(g)

    def test_dispatch_labels(self, model):
        weights = sample_weights(model, 50, np.random.default_rng(5))
        assert generate(weights, ModelKind.parse("NR"), np.random.default_rng(0), model).label == "NR"
        assert generate(weights, ModelKind.parse("GRG'"), np.random.default_rng(0), model).label == "GRG'"

    def test_rejects_unknown_kind(self):
        with pytest.raises(ParameterError):
            generate_simple(WeightVector([1.0, 1.0]), "NR", "Ln", np.random.default_rng(0))

    def test_fast_nr_matches_naive_edge_total(self, model):
        # Pairs contribute (L_n^2 - sum W^2) / (2 L_n), loops sum W^2 / L_n
        weights = sample_weights(model, 40, np.random.default_rng(11))
        expected = weights.total / 2 + np.sum(weights.weights ** 2) / (2 * weights.total)
        rng = np.random.default_rng(12)
        reps = 4000
        fast = np.mean([generate_nr(weights, "Ln", rng).edge_total for _ in range(reps)])
        naive = np.mean([generate_nr_naive(weights, "Ln", rng).edge_total for _ in range(reps)])
        tolerance = 4 * math.sqrt(expected / reps)
        assert fast == pytest.approx(expected, abs=tolerance)
        assert naive == pytest.approx(expected, abs=tolerance)


class TestGeneratorFidelity:
    """Per-pair frequencies against the exact connection laws"""

    WEIGHTS = WeightVector([0.3, 0.9, 1.7, 2.4])

    def _pair_rates(self):
        w = self.WEIGHTS.weights
        return np.outer(w, w) / self.WEIGHTS.total

    @pytest.mark.parametrize("kind", ["ENR", "CL", "GRG"])
    def test_simple_edge_frequencies(self, kind):
        reps = 20_000
        rng = np.random.default_rng(77)
        hits = np.zeros((4, 4))
        for _ in range(reps):
            g = generate_simple(self.WEIGHTS, kind, "Ln", rng)
            us, vs, _ = g.edges()
            hits[us, vs] += 1
        rates = self._pair_rates()
        for x in range(4):
            for y in range(x + 1, 4):
                p = float(edge_probability(rates[x, y], kind))
                standard_error = math.sqrt(p * (1 - p) / reps)
                assert abs(hits[x, y] / reps - p) < 4 * standard_error + 1e-12

    def test_nr_multiplicity_means(self):
        reps = 20_000
        rng = np.random.default_rng(78)
        totals = np.zeros((4, 4))
        loops = np.zeros(4)
        for _ in range(reps):
            g = generate_nr(self.WEIGHTS, "Ln", rng)
            us, vs, mults = g.edges()
            totals[us, vs] += mults
            loops += g.loop_counts
        rates = self._pair_rates()
        for x in range(4):
            for y in range(x + 1, 4):
                assert abs(totals[x, y] / reps - rates[x, y]) < 4 * math.sqrt(rates[x, y] / reps)
            assert abs(loops[x] / reps - rates[x, x]) < 4 * math.sqrt(rates[x, x] / reps)

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", ["ENR", "CL", "GRG"])
    def test_fifty_vertex_frequencies(self, model, kind):
        weights = sample_weights(model, 50, np.random.default_rng(5))
        reps = 100_000
        rng = np.random.default_rng(6)
        hits = np.zeros((50, 50))
        for _ in range(reps):
            us, vs, _ = generate_simple(weights, kind, "Ln", rng).edges()
            hits[us, vs] += 1
        rates = np.outer(weights.weights, weights.weights) / weights.total
        p = edge_probability(rates, kind)
        upper = np.triu_indices(50, k=1)
        standard_error = np.sqrt(p[upper] * (1 - p[upper]) / reps)
        assert np.all(np.abs(hits[upper] / reps - p[upper]) < 4 * standard_error + 1e-12)


class TestTwoVertexLaws:
    """n = 2, W = (1, 1), D = L_n = 2, so p = 1/2"""

    WEIGHTS = WeightVector([1.0, 1.0])
    REPS = 20_000

    @pytest.mark.parametrize("kind, expected", [
        ("ENR", 1 - math.exp(-0.5)),
        ("CL", 0.5),
        ("GRG", 1 / 3),
    ])
    def test_edge_probability(self, kind, expected):
        assert float(edge_probability(0.5, kind)) == pytest.approx(expected, rel=1e-12)
        rng = np.random.default_rng(31)
        hits = sum(generate_simple(self.WEIGHTS, kind, "Ln", rng).edge_total for _ in range(self.REPS))
        standard_error = math.sqrt(expected * (1 - expected) / self.REPS)
        assert abs(hits / self.REPS - expected) < 4 * standard_error

    def test_enr_edge_probability_value(self):
        assert float(edge_probability(0.5, "ENR")) == pytest.approx(0.39347, abs=1e-5)

    def test_nr_mean_multiplicity(self):
        rng = np.random.default_rng(32)
        for generator in (generate_nr, generate_nr_naive):
            total = sum(generator(self.WEIGHTS, "Ln", rng).multiplicity(0, 1) for _ in range(self.REPS))
            assert abs(total / self.REPS - 0.5) < 4 * math.sqrt(0.5 / self.REPS)


class TestDegreeLaw:

    def test_enr_degrees_are_mixed_poisson(self, model):
        n = 100_000
        weights = sample_weights(model, n, np.random.default_rng(41))
        g = generate_simple(weights, "ENR", "Ln", np.random.default_rng(42))
        degrees = g.degrees()
        # Degree of a vertex with weight w is close to Poisson(w)
        assert degrees.mean() == pytest.approx(model.mean, rel=0.05)
        assert np.mean(degrees == 0) == pytest.approx(exp_moment(model, 0), rel=0.05)


@pytest.mark.slow
class TestFastNrAgainstNaive:

    def test_fifty_vertex_multiplicity_means(self, model):
        weights = sample_weights(model, 50, np.random.default_rng(51))
        w = weights.weights
        rates = np.outer(w, w) / weights.total
        upper = np.triu_indices(50, k=1)
        reps = 20_000
        rng = np.random.default_rng(52)
        for generator in (generate_nr, generate_nr_naive):
            totals = np.zeros((50, 50))
            loops = np.zeros(50)
            for _ in range(reps):
                g = generator(weights, "Ln", rng)
                us, vs, mults = g.edges()
                totals[us, vs] += mults
                loops += g.loop_counts
            pair_error = np.abs(totals[upper] / reps - rates[upper])
            assert np.all(pair_error < 5 * np.sqrt(rates[upper] / reps))
            loop_rates = np.diag(rates)
            assert np.all(np.abs(loops / reps - loop_rates) < 5 * np.sqrt(loop_rates / reps))


class TestFiles:

    def test_edge_list_round_trip(self, tmp_path):
        g = make_graph(4, [(0, 1), (0, 1), (2, 2), (1, 3)], label="NR")
        path = tmp_path / "graph.edges"
        write_edge_list(str(path), g, ["seed=1"])
        text = path.read_text().splitlines()
        assert text[0] == "# n=4 model=NR"
        assert text[1] == "# seed=1"
        assert text[2:] == ["1 2 2", "2 4 1", "3 3 1"]
        loaded = read_edge_list(str(path))
        assert loaded.n == 4
        assert loaded.multiplicity(0, 1) == 2
        assert loaded.multiplicity(2, 2) == 1

    def test_empty_graph_round_trip(self, tmp_path):
        path = tmp_path / "empty.edges"
        write_edge_list(str(path), make_graph(3, []))
        loaded = read_edge_list(str(path))
        assert loaded.n == 3
        assert loaded.edge_total == 0

    def test_weights_round_trip_is_exact(self, tmp_path, model):
        weights = sample_weights(model, 100, np.random.default_rng(0))
        path = tmp_path / "weights.txt"
        write_weights(str(path), weights)
        assert np.array_equal(read_weights(str(path)).weights, weights.weights)
