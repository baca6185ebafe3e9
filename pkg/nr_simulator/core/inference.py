"""
Inference - Goodness-of-fit tests and the replication harness

Replication r (1-based) is fully determined by the experiment configuration
and derive_seed(base_seed, r); results are merged by replication index, so
the output does not depend on execution order or on the number of workers.
"""

import functools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import special, stats
from tqdm import tqdm

from .. import __version__
from ..models.schemas import (
    ExperimentConfig,
    ReplicationResult,
    SpecRecord,
    TestReport,
    XiConstant,
)
from ..utils.seeding import derive_seed
from .components import components
from .exceptions import ParameterError, SimulatorError
from .graphgen import generate
from .limits import PointSet, frechet_cdf, kth_largest_cdf, nu_beta, xi
from .statistics import statistic_per_component
from .weights import q_n, sample_weights

logger = logging.getLogger(__name__)

MIN_KS_SAMPLES = 5
MIN_POISSON_COUNTS = 20


# =====================================================
# Goodness-of-fit tests
# =====================================================

def ks_statistic(samples: Sequence[float], cdf: Callable) -> float:
    """
    One-sample Kolmogorov-Smirnov distance

    D = max_i max(i/N - F(x_(i)), F(x_(i)) - (i-1)/N) over the sorted samples.

    Args:
        samples: Observations (at least one)
        cdf: Vectorized CDF

    Returns:
        D
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    size = x.size
    if size == 0:
        raise ParameterError("KS statistic needs at least one sample")
    fitted = np.asarray(cdf(x), dtype=np.float64)
    ranks = np.arange(1, size + 1)
    upper = np.max(ranks / size - fitted)
    lower = np.max(fitted - (ranks - 1) / size)
    return float(max(upper, lower))


def ks_test(
    samples: Sequence[float],
    cdf: Callable,
    level: float = 0.01,
    name: str = "KS",
    max_distance: Optional[float] = None,
    advisory: bool = False,
) -> TestReport:
    """
    Kolmogorov-Smirnov test with the asymptotic Kolmogorov p-value

    Args:
        samples: Observations, at least 5
        cdf: Hypothesized CDF
        level: Significance level
        name: Report name
        max_distance: Optional extra bound on D; exceeding it also rejects
        advisory: Mark the report as informational

    Returns:
        TestReport
    """
    size = len(samples)
    if size < MIN_KS_SAMPLES:
        raise ParameterError(f"KS test needs at least {MIN_KS_SAMPLES} samples, got {size}")
    distance = ks_statistic(samples, cdf)
    p_value = float(min(1.0, max(0.0, special.kolmogorov(math.sqrt(size) * distance))))
    reject = p_value < level
    details: Dict[str, object] = {"critical_distance": _kolmogorov_critical(level, size)}
    if max_distance is not None:
        details["max_distance"] = max_distance
        reject = reject or distance >= max_distance
    return TestReport(
        name=name,
        statistic=distance,
        p_value=p_value,
        level=level,
        reject=reject,
        sample_size=size,
        advisory=advisory,
        details=details,
    )


def insufficient_report(
    name: str,
    size: int,
    minimum: int,
    level: float,
    advisory: bool = False,
) -> TestReport:
    """Rejecting report for a check that has too few successful replications"""
    return TestReport(
        name=name,
        statistic=float("nan"),
        p_value=None,
        level=level,
        reject=True,
        sample_size=size,
        advisory=advisory,
        details={"reason": f"needs at least {minimum} successful replications, got {size}"},
    )


def _kolmogorov_critical(level: float, size: int) -> float:
    """Asymptotic critical distance, e.g. 1.628/sqrt(N) at level 0.01"""
    return float(special.kolmogi(level) / math.sqrt(size))


def poisson_gof(
    counts: Sequence[int],
    lam: float,
    level: float = 0.01,
    name: str = "Poisson",
) -> TestReport:
    """
    Check that counts are i.i.d. Poisson(lam)

    Two checks at level/2 each: a z-test of the sample mean against lam with
    standard error sqrt(lam/R), and the dispersion index (R-1) s^2 / mean
    against chi-square(R-1), two-sided. The reported p-value is the
    Bonferroni combination min(1, 2 * min(p_mean, p_dispersion)).

    Args:
        counts: One count per replication, at least 20
        lam: Expected count, > 0
        level: Significance level
        name: Report name

    Returns:
        TestReport whose statistic is the z-score of the mean
    """
    values = np.asarray(counts, dtype=np.float64)
    size = values.size
    if size < MIN_POISSON_COUNTS:
        raise ParameterError(f"Poisson check needs at least {MIN_POISSON_COUNTS} counts, got {size}")
    if not lam > 0:
        raise ParameterError(f"Poisson mean must be positive, got {lam}")
    if np.any(values < 0):
        raise ParameterError("Counts must be non-negative")

    mean = float(values.mean())
    z_score = (mean - lam) / math.sqrt(lam / size)
    p_mean = float(2.0 * stats.norm.sf(abs(z_score)))

    if mean > 0:
        dispersion = (size - 1) * float(values.var(ddof=1)) / mean
        dof = size - 1
        p_dispersion = float(min(1.0, 2.0 * min(stats.chi2.cdf(dispersion, dof), stats.chi2.sf(dispersion, dof))))
    else:
        # No events at all: variance and mean both vanish
        dispersion = 0.0
        p_dispersion = 0.0

    p_value = min(1.0, 2.0 * min(p_mean, p_dispersion))
    return TestReport(
        name=name,
        statistic=z_score,
        p_value=p_value,
        level=level,
        reject=p_value < level,
        sample_size=size,
        details={
            "mean": mean,
            "lambda": lam,
            "p_mean": p_mean,
            "dispersion_index": dispersion,
            "p_dispersion": p_dispersion,
        },
    )


# =====================================================
# Replication harness
# =====================================================

def interval_column(interval) -> str:
    """Results column of an interval, e.g. count_1_inf"""
    a, b = interval
    return f"count_{a:g}_{b:g}"


def compute_xis(config: ExperimentConfig) -> Dict[str, float]:
    """xi of every configured statistic, keyed by statistic label"""
    model = config.weight_model
    return {spec.label: xi(model, spec).value for spec in config.specs}


def run_replication(
    config: ExperimentConfig,
    rep: int,
    xis: Dict[str, float],
    base_seed: Optional[int] = None,
) -> ReplicationResult:
    """
    One replication: weights, graph, components, every configured statistic

    Args:
        config: Experiment configuration
        rep: Replication index (1-based)
        xis: xi per statistic label
        base_seed: Overrides config.base_seed

    Returns:
        ReplicationResult; a SimulatorError is recorded in its error field
    """
    seed = derive_seed(config.base_seed if base_seed is None else base_seed, rep)
    result = ReplicationResult(rep=rep, seed=seed, n=config.n)
    try:
        model = config.weight_model
        qn = q_n(model, config.n)
        rng = np.random.default_rng(seed)
        weights = sample_weights(model, config.n, rng)
        graph = generate(weights, config.model_kind, rng, model)
        view = components(graph, weights)
        top = weights.argmax
        top_component = view.component_of(top)

        records = []
        for spec in config.specs:
            values = statistic_per_component(graph, view, spec, config.path_cap)
            points = PointSet(values / (qn * xis[spec.label]))
            records.append(SpecRecord(
                spec=spec.label,
                point_max=points.max_point() or 0.0,
                point_second=points.kth_largest(2) or 0.0,
                counts={interval_column(i): points.interval_count(*i) for i in config.intervals},
                s_top=int(values[top_component]),
            ))
        return result.model_copy(update={"w_top": weights.max_weight, "q_n": qn, "records": records})
    except SimulatorError as e:
        logger.warning(f"Replication {rep} (seed {seed}) failed: {e}")
        return result.model_copy(update={"error": f"{type(e).__name__}: {e}"})


def run_replications(
    config: ExperimentConfig,
    R: Optional[int] = None,
    base_seed: Optional[int] = None,
    workers: int = 1,
    progress: bool = True,
    order: Optional[Iterable[int]] = None,
) -> List[ReplicationResult]:
    """
    Run replications 1..R, optionally across worker processes

    Args:
        config: Experiment configuration
        R: Replication count; defaults to config.replications
        base_seed: Defaults to config.base_seed
        workers: Worker processes (1 runs in-process)
        progress: Show a progress bar
        order: Execution order of the indices; any permutation gives the same output

    Returns:
        Results sorted by replication index
    """
    R = config.replications if R is None else R
    if R < 1:
        raise ParameterError(f"replications must be >= 1, got {R}")
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")

    indices = list(range(1, R + 1)) if order is None else list(order)
    if sorted(indices) != list(range(1, R + 1)):
        raise ParameterError("order must be a permutation of 1..R")

    xis = compute_xis(config)
    task = functools.partial(run_replication, config, xis=xis, base_seed=base_seed)
    logger.info(f"Running {R} replications of {config.model_kind.label} with n={config.n} on {workers} worker(s)")

    results: List[ReplicationResult] = []
    with tqdm(total=R, desc="Replications", disable=not progress) as bar:
        if workers == 1:
            for rep in indices:
                results.append(task(rep))
                bar.update(1)
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for result in pool.map(task, indices, chunksize=max(1, R // (8 * workers))):
                    results.append(result)
                    bar.update(1)

    results.sort(key=lambda r: r.rep)
    failed = sum(1 for r in results if not r.ok)
    if failed:
        logger.warning(f"{failed} of {R} replications failed")
    return results


# =====================================================
# Results table
# =====================================================

def results_frame(config: ExperimentConfig, results: Sequence[ReplicationResult]) -> pd.DataFrame:
    """One row per (replication, statistic)"""
    count_columns = [interval_column(i) for i in config.intervals]
    rows = []
    for result in results:
        if not result.ok:
            for spec in config.specs:
                row = {"rep": result.rep, "seed": result.seed, "n": result.n, "spec": spec.label}
                row.update({column: None for column in ["point_max", *count_columns, "s_top", "w_top", "point_second"]})
                row["error"] = result.error
                rows.append(row)
            continue
        for record in result.records:
            row = {
                "rep": result.rep,
                "seed": result.seed,
                "n": result.n,
                "spec": record.spec,
                "point_max": record.point_max,
            }
            row.update({column: record.counts[column] for column in count_columns})
            row.update({
                "s_top": record.s_top,
                "w_top": result.w_top,
                "point_second": record.point_second,
                "error": "",
            })
            rows.append(row)
    columns = ["rep", "seed", "n", "spec", "point_max", *count_columns, "s_top", "w_top", "point_second", "error"]
    frame = pd.DataFrame(rows, columns=columns)
    for column in ["rep", "seed", "n"]:
        frame[column] = frame[column].astype("uint64" if column == "seed" else "int64")
    for column in [*count_columns, "s_top"]:
        frame[column] = frame[column].astype("Int64")
    return frame


def write_results_csv(path: str, config: ExperimentConfig, results: Sequence[ReplicationResult]) -> None:
    """Results CSV after '#' lines echoing the version and full configuration"""
    frame = results_frame(config, results)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"# nr_simulator {__version__}\n")
        for line in config.echo():
            handle.write(f"# {line}\n")
        frame.to_csv(handle, index=False, float_format="%.17g", lineterminator="\n")


# =====================================================
# Verification summary
# =====================================================

def summarize_verification(
    config: ExperimentConfig,
    results: Sequence[ReplicationResult],
    xis: Optional[Dict[str, XiConstant]] = None,
) -> List[TestReport]:
    """
    Every statistical check of a verify run

    Per statistic: KS of the largest point against the Frechet law, an
    advisory KS of the second largest point, a Poisson check per interval
    and the mean of S_n(v_top)/W_top against xi. Once per run: KS of
    W_(n)/q(n) against the Frechet law.

    Args:
        config: Experiment configuration
        results: Replication results
        xis: xi per statistic label (computed when omitted)

    Returns:
        Reports in a fixed order
    """
    beta = config.beta
    ok = [r for r in results if r.ok]
    if xis is None:
        xis = {spec.label: xi(config.weight_model, spec) for spec in config.specs}

    reports: List[TestReport] = []
    for spec in config.specs:
        label = spec.label
        records = [next(rec for rec in r.records if rec.spec == label) for r in ok]

        enough_ks = len(records) >= MIN_KS_SAMPLES
        name = f"{label}: largest point vs Frechet({beta:g})"
        reports.append(ks_test(
            [rec.point_max for rec in records],
            lambda x: frechet_cdf(x, beta),
            level=config.level,
            name=name,
            max_distance=config.max_ks_distance,
        ) if enough_ks else insufficient_report(name, len(records), MIN_KS_SAMPLES, config.level))
        name = f"{label}: second largest point vs limit law"
        reports.append(ks_test(
            [rec.point_second for rec in records],
            lambda x: kth_largest_cdf(x, 2, beta),
            level=config.level,
            name=name,
            advisory=True,
        ) if enough_ks else insufficient_report(name, len(records), MIN_KS_SAMPLES, config.level, advisory=True))
        for interval in config.intervals:
            column = interval_column(interval)
            name = f"{label}: points in ({interval[0]:g}, {interval[1]:g}] vs Poisson"
            if len(records) < MIN_POISSON_COUNTS:
                reports.append(insufficient_report(name, len(records), MIN_POISSON_COUNTS, config.level))
                continue
            reports.append(poisson_gof(
                [rec.counts[column] for rec in records],
                nu_beta(interval[0], interval[1], beta),
                level=config.level,
                name=name,
            ))

        xi_value = xis[label].value
        ratios = np.array([rec.s_top / r.w_top for rec, r in zip(records, ok)])
        mean_ratio = float(ratios.mean()) if ratios.size else float("nan")
        relative_error = abs(mean_ratio - xi_value) / xi_value
        reports.append(TestReport(
            name=f"{label}: mean S_n(v_top)/W_top vs xi",
            statistic=relative_error,
            p_value=None,
            level=config.level,
            reject=not relative_error <= config.a1_tolerance,
            sample_size=int(ratios.size),
            details={"mean_ratio": mean_ratio, "xi": xi_value, "tolerance": config.a1_tolerance},
        ))

    name = f"control: W_(n)/q(n) vs Frechet({beta:g})"
    if len(ok) < MIN_KS_SAMPLES:
        reports.append(insufficient_report(name, len(ok), MIN_KS_SAMPLES, config.level))
    else:
        reports.append(ks_test(
            [r.w_top / r.q_n for r in ok],
            lambda x: frechet_cdf(x, beta),
            level=config.level,
            name=name,
            max_distance=config.control_max_ks_distance,
        ))
    return reports
