"""
Tests for goodness-of-fit checks and the replication harness
"""
import math

import numpy as np
import pandas as pd
import pytest

from nr_simulator.core.exceptions import ParameterError
from nr_simulator.core.inference import (
    compute_xis,
    interval_column,
    ks_statistic,
    ks_test,
    poisson_gof,
    results_frame,
    run_replication,
    run_replications,
    summarize_verification,
    write_results_csv,
)
from nr_simulator.core.limits import frechet_cdf
from nr_simulator.models.schemas import ExperimentConfig
from nr_simulator.utils.seeding import derive_seed, splitmix64


def uniform_cdf(x):
    return np.clip(x, 0.0, 1.0)


class TestKolmogorovSmirnov:

    def test_single_sample_distance(self):
        assert ks_statistic([0.5], uniform_cdf) == pytest.approx(0.5)

    def test_needs_five_samples(self):
        with pytest.raises(ParameterError):
            ks_test([0.1, 0.2, 0.3, 0.4], uniform_cdf)

    def test_exact_samples_usually_pass(self):
        rng = np.random.default_rng(11)
        size = 10_000
        passes = sum(
            ks_statistic(rng.random(size), uniform_cdf) < 1.63 / math.sqrt(size) for _ in range(200)
        )
        assert passes >= 194

    def test_degenerate_samples_reject(self):
        report = ks_test([5.0] * 50, uniform_cdf, level=0.01)
        assert report.p_value < 1e-6
        assert report.reject

    def test_invariant_under_probability_integral_transform(self):
        rng = np.random.default_rng(12)
        samples = (-np.log(rng.random(300))) ** (-1 / 3.0)  # Frechet(3)
        direct = ks_test(samples, lambda x: frechet_cdf(x, 3.0))
        mapped = ks_test(frechet_cdf(samples, 3.0), uniform_cdf)
        assert direct.statistic == pytest.approx(mapped.statistic, abs=1e-12)
        assert direct.p_value == pytest.approx(mapped.p_value, abs=1e-12)

    def test_max_distance_bound_rejects(self):
        rng = np.random.default_rng(13)
        report = ks_test(rng.random(30), uniform_cdf, max_distance=1e-3)
        assert report.reject
        assert report.details["max_distance"] == 1e-3

    def test_critical_distance(self):
        report = ks_test(np.linspace(0.05, 0.95, 10_000), uniform_cdf, level=0.01)
        assert report.details["critical_distance"] == pytest.approx(1.628 / 100, rel=1e-3)


class TestPoissonGof:

    def test_all_zero_counts_reject(self):
        report = poisson_gof([0] * 100, 1.0)
        assert report.reject
        assert report.statistic == pytest.approx(-10.0)

    def test_constant_counts_are_under_dispersed(self):
        report = poisson_gof([2] * 100, 2.0)
        assert report.details["dispersion_index"] == 0.0
        assert report.reject

    def test_needs_twenty_counts(self):
        with pytest.raises(ParameterError):
            poisson_gof([1] * 19, 1.0)

    def test_rejection_rate_matches_level(self):
        rng = np.random.default_rng(14)
        level = 0.05
        rejections = sum(poisson_gof(rng.poisson(1.0, size=200), 1.0, level=level).reject for _ in range(1000))
        assert level / 2 <= rejections / 1000 <= 2 * level


class TestSeeding:

    def test_known_splitmix_output(self):
        # First output of the reference SplitMix64 generator seeded with 0
        assert splitmix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF

    def test_injective_over_replications(self):
        seeds = {derive_seed(20240101, r) for r in range(1, 1_000_001)}
        assert len(seeds) == 1_000_000


@pytest.fixture
def small_config(tmp_path):
    return ExperimentConfig(
        n=400,
        replications=6,
        kind="ENR",
        specs="all,distance:2,tree:0 1 1",
        output_dir=str(tmp_path),
    )


class TestReplications:

    def test_deterministic(self, small_config):
        a = run_replications(small_config, progress=False)
        b = run_replications(small_config, progress=False)
        assert [r.model_dump() for r in a] == [r.model_dump() for r in b]

    def test_order_independent(self, small_config):
        forward = run_replications(small_config, progress=False)
        shuffled = run_replications(small_config, progress=False, order=[4, 2, 6, 1, 5, 3])
        assert [r.model_dump() for r in forward] == [r.model_dump() for r in shuffled]

    def test_parallel_matches_serial(self, small_config):
        serial = run_replications(small_config, progress=False)
        parallel = run_replications(small_config, progress=False, workers=2)
        assert [r.model_dump() for r in serial] == [r.model_dump() for r in parallel]

    def test_record_contents(self, small_config):
        result = run_replication(small_config, 1, compute_xis(small_config))
        assert result.ok
        assert result.seed == derive_seed(small_config.base_seed, 1)
        assert [rec.spec for rec in result.records] == ["all", "distance:2", "tree:(()())"]
        everything = result.records[0]
        assert everything.s_top >= 1
        assert set(everything.counts) == {"count_1_inf", "count_1_2"}
        assert everything.point_max >= everything.point_second

    def test_errors_are_recorded(self, tmp_path):
        config = ExperimentConfig(n=300, replications=2, specs="tree:0", path_cap=1, output_dir=str(tmp_path))
        results = run_replications(config, progress=False)
        assert all(not r.ok for r in results)
        assert "ComponentTooLargeError" in results[0].error
        frame = results_frame(config, results)
        assert len(frame) == 2
        assert frame["point_max"].isna().all()

    def test_rejects_bad_order(self, small_config):
        with pytest.raises(ParameterError):
            run_replications(small_config, progress=False, order=[1, 1, 2, 3, 4, 5])


class TestResultsCsv:

    def test_columns_and_header(self, small_config, tmp_path):
        results = run_replications(small_config, progress=False)
        path = tmp_path / "results.csv"
        write_results_csv(str(path), small_config, results)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# nr_simulator ")
        assert "# n=400" in lines
        frame = pd.read_csv(path, comment="#")
        assert list(frame.columns) == [
            "rep", "seed", "n", "spec", "point_max", "count_1_inf", "count_1_2",
            "s_top", "w_top", "point_second", "error",
        ]
        assert len(frame) == 6 * 3

    def test_byte_identical_across_workers(self, small_config, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        write_results_csv(str(first), small_config, run_replications(small_config, progress=False))
        write_results_csv(str(second), small_config, run_replications(small_config, progress=False, workers=3))
        assert first.read_bytes() == second.read_bytes()

    def test_interval_column(self):
        assert interval_column((1.0, math.inf)) == "count_1_inf"
        assert interval_column((0.5, 2.0)) == "count_0.5_2"


class TestSummary:

    def test_report_layout(self, tmp_path):
        config = ExperimentConfig(n=500, replications=20, specs="all", output_dir=str(tmp_path))
        results = run_replications(config, progress=False)
        reports = summarize_verification(config, results)
        names = [r.name for r in reports]
        assert len(reports) == 1 + 1 + 2 + 1 + 1
        assert names[-1].startswith("control")
        assert reports[1].advisory
        a1 = reports[4]
        assert a1.p_value is None
        assert a1.details["xi"] == 2.0

    def test_too_few_replications_reject_instead_of_raising(self, small_config):
        results = run_replications(small_config, progress=False)
        reports = summarize_verification(small_config, results)
        poisson = [r for r in reports if "vs Poisson" in r.name]
        assert len(poisson) == 3 * 2
        assert all(r.reject and r.p_value is None for r in poisson)
        assert "needs at least 20" in poisson[0].details["reason"]
        assert not math.isnan(reports[0].statistic)

    def test_all_replications_failed(self, tmp_path):
        config = ExperimentConfig(n=300, replications=20, specs="tree:0", path_cap=1, output_dir=str(tmp_path))
        results = run_replications(config, progress=False)
        assert not any(r.ok for r in results)
        reports = summarize_verification(config, results)
        assert len(reports) == 6
        assert all(r.reject for r in reports)
        assert all(r.sample_size == 0 for r in reports)
        assert reports[-1].details["reason"] == "needs at least 5 successful replications, got 0"


@pytest.mark.slow
class TestLimitReproduction:
    """Desk-scale reproduction of the limit theorems"""

    @pytest.mark.parametrize("kind, normalizer", [("ENR", "Ln"), ("CL", "Ln"), ("GRG", "Ln"), ("ENR", "nEW")])
    def test_largest_component_is_frechet(self, tmp_path, kind, normalizer):
        config = ExperimentConfig(
            n=100_000,
            replications=500,
            kind=kind,
            normalizer=normalizer,
            specs="all",
            max_ks_distance=0.10,
            control_max_ks_distance=0.06,
            output_dir=str(tmp_path),
        )
        results = run_replications(config, workers=4, progress=False)
        reports = summarize_verification(config, results)
        largest, control = reports[0], reports[-1]
        assert not largest.reject
        assert not control.reject

    def test_interval_counts_are_poisson(self, tmp_path):
        config = ExperimentConfig(n=100_000, replications=500, specs="all", output_dir=str(tmp_path))
        results = run_replications(config, workers=4, progress=False)
        reports = summarize_verification(config, results)
        for report in reports[2:4]:
            assert abs(report.details["mean"] - report.details["lambda"]) <= 4 * math.sqrt(1 / 500)
            assert report.details["p_dispersion"] >= 0.01 / 2

    def test_mean_ratio_at_top_vertex(self, tmp_path):
        config = ExperimentConfig(
            n=100_000, replications=200, specs="all,distance:2", a1_tolerance=0.15, output_dir=str(tmp_path)
        )
        results = run_replications(config, workers=4, progress=False)
        reports = {r.name: r for r in summarize_verification(config, results)}
        assert reports["all: mean S_n(v_top)/W_top vs xi"].statistic <= 0.10
        assert reports["distance:2: mean S_n(v_top)/W_top vs xi"].statistic <= 0.15
