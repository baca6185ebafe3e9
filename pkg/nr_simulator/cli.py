"""
Command Line - generate, xi, verify, tree and moments subcommands

Settings are merged in increasing priority: NRSIM_* environment variables
(a .env file is honoured), a key=value config file, command-line flags.

Exit codes: 0 pass, 1 statistical rejection, 2 usage or config error,
3 runtime error.
"""

import argparse
import logging
import os
import sys
import time
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

from . import __version__
from .core.exceptions import ConfigError, SimulatorError
from .core.graphgen import generate, write_edge_list, write_weights
from .core.inference import MIN_POISSON_COUNTS, run_replications, summarize_verification, write_results_csv
from .core.limits import xi
from .core.trees import RootedTree, all_rooted_trees
from .core.weights import check_subcritical, moments_table, sample_weights
from .models.schemas import ExperimentConfig, WeightModel
from .utils.logger import log_run_event, setup_logging
from .utils.seeding import derive_seed
from .utils.validators import validate_output_path

load_dotenv(override=False)

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

CONFIG_KEYS = [
    "beta", "t_min", "kind", "normalizer", "n", "replications", "base_seed",
    "specs", "intervals", "level", "path_cap", "max_ks_distance",
    "control_max_ks_distance", "a1_tolerance", "output_dir",
]


# =====================================================
# Configuration
# =====================================================

def read_config_file(path: str) -> Dict[str, str]:
    """
    Parse a flat key=value file; '#' starts a comment, lists are comma separated

    Args:
        path: Config file

    Returns:
        Raw string values by key
    """
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{number}: expected key=value, got '{line}'")
            key = key.strip().replace("-", "_")
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{number}: unknown key '{key}'")
            values[key] = value.strip()
    return values


def environment_settings() -> Dict[str, str]:
    """NRSIM_<KEY> variables that are set and non-empty"""
    values = {}
    for key in CONFIG_KEYS:
        value = os.getenv(f"NRSIM_{key.upper()}", "").strip()
        if value:
            values[key] = value
    return values


def merged_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """Environment < config file < flags; empty values mean "use the default" """
    settings: Dict[str, Any] = environment_settings()
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = ",".join(value) if isinstance(value, list) else value
    return {key: value for key, value in settings.items() if value != ""}


def format_validation_error(error: ValidationError) -> str:
    """One line per violated constraint, naming the field"""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        message = item["msg"].removeprefix("Value error, ")
        lines.append(f"{location}: {message}")
    return "; ".join(lines)


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Build the validated ExperimentConfig for a subcommand"""
    try:
        return ExperimentConfig(**merged_settings(args))
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {format_validation_error(e)}") from e


def runtime_workers(args: argparse.Namespace) -> int:
    value = args.workers if args.workers is not None else os.getenv("NRSIM_WORKERS", "1")
    try:
        workers = int(value)
    except ValueError:
        raise ConfigError(f"workers must be an integer, got '{value}'")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    return workers


def header_lines(config: ExperimentConfig, *extra: str) -> List[str]:
    return [f"nr_simulator {__version__}", *config.echo(), *extra]


def checked_path(path: str) -> str:
    error = validate_output_path(path)
    if error:
        raise ConfigError(error)
    return path


# =====================================================
# Subcommands
# =====================================================

def cmd_generate(args: argparse.Namespace) -> int:
    """Write one graph and its weights"""
    config = load_config(args)
    edges_path = checked_path(args.edges or os.path.join(config.output_dir, "graph.edges"))
    weights_path = checked_path(args.weights or os.path.join(config.output_dir, "weights.txt"))

    seed = derive_seed(config.base_seed, 1)
    rng = np.random.default_rng(seed)
    model = config.weight_model
    weights = sample_weights(model, config.n, rng)
    graph = generate(weights, config.model_kind, rng, model)

    header = header_lines(config, f"seed={seed}")
    write_edge_list(edges_path, graph, header)
    write_weights(weights_path, weights, header)

    print("=" * 60)
    print(f"Generated {graph.label} graph")
    print("=" * 60)
    print(f"   vertices : {graph.n}")
    print(f"   edges    : {graph.edge_total}")
    print(f"   seed     : {seed}")
    print(f"✅ Edge list -> {edges_path}")
    print(f"✅ Weights   -> {weights_path}")
    return EXIT_PASS


def cmd_xi(args: argparse.Namespace) -> int:
    """Print xi for every configured statistic"""
    config = load_config(args)
    model = config.weight_model
    print("=" * 60)
    print(f"xi for Pareto(beta={config.beta:g}, t_min={config.t_min:g})")
    print("=" * 60)
    for spec in config.specs:
        constant = xi(model, spec)
        print(f"xi({spec.label}) = {constant.value:.12g}")
        for name, value in constant.moments.items():
            print(f"   {name} = {value:.12g}")
    return EXIT_PASS


def cmd_verify(args: argparse.Namespace) -> int:
    """Replicate, test, and write results.csv, report.txt and report.kv"""
    config = load_config(args)
    if config.n < 2:
        raise ConfigError(f"verify needs n >= 2 for q(n), got n={config.n}")
    if config.replications < MIN_POISSON_COUNTS:
        raise ConfigError(
            f"verify needs replications >= {MIN_POISSON_COUNTS} for the Poisson checks, got {config.replications}"
        )
    workers = runtime_workers(args)
    results_path = checked_path(os.path.join(config.output_dir, "results.csv"))
    report_path = checked_path(os.path.join(config.output_dir, "report.txt"))
    kv_path = checked_path(os.path.join(config.output_dir, "report.kv"))

    model = config.weight_model
    xis = {spec.label: xi(model, spec) for spec in config.specs}
    results = run_replications(config, workers=workers, progress=not args.quiet)
    write_results_csv(results_path, config, results)

    failed = [r for r in results if not r.ok]
    reports = summarize_verification(config, results, xis)
    rejected = [r for r in reports if r.reject and not r.advisory]

    header = "\n".join(f"# {line}" for line in header_lines(config))
    summary = [
        f"replications: {len(results)} run, {len(failed)} failed",
        f"checks: {len(reports)} run, {len(rejected)} rejected",
    ]
    for result in failed[:10]:
        summary.append(f"failed replication {result.rep} (seed {result.seed}): {result.error}")

    with open(report_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        f.write("\n".join(summary) + "\n\n")
        f.write("\n\n".join(report.to_text() for report in reports) + "\n")
    with open(kv_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        f.write(f"replications={len(results)}\nfailed={len(failed)}\n\n")
        f.write("\n\n".join(report.to_key_value() for report in reports) + "\n")

    print("=" * 60)
    print(f"Verification: {config.model_kind.label}, n={config.n}, R={config.replications}")
    print("=" * 60)
    for line in summary:
        print(line)
    for report in reports:
        marker = "❌" if report.reject and not report.advisory else ("⚠️" if report.reject else "✅")
        p_text = "n/a" if report.p_value is None else f"{report.p_value:.4g}"
        print(f"{marker} {report.name}: statistic={report.statistic:.4g}, p={p_text}")
    print(f"\nResults -> {results_path}")
    print(f"Report  -> {report_path}")
    return EXIT_REJECT if rejected else EXIT_PASS


def cmd_tree(args: argparse.Namespace) -> int:
    """Canonical form, c(T) and degrees of a rooted tree, or all trees of a size"""
    if args.enumerate is not None:
        trees = all_rooted_trees(args.enumerate)
        print(f"{len(trees)} rooted trees with {args.enumerate} vertices")
        for tree in trees:
            print(f"{tree.canonical}  c(T)={tree.automorphisms}  parents={tree.to_parent_array()}")
        return EXIT_PASS
    if not args.tree:
        raise ConfigError("tree needs a parent array such as \"0 1 1\" or --enumerate M")
    tree = RootedTree.parse(" ".join(args.tree))
    print(f"canonical: {tree.canonical}")
    print(f"c(T): {tree.automorphisms}")
    print(f"degrees: {' '.join(str(d) for d in tree.degrees)}")
    return EXIT_PASS


def cmd_moments(args: argparse.Namespace) -> int:
    """Moment functionals of any Pareto law, subcritical or not"""
    settings = merged_settings(args)
    try:
        model = WeightModel(
            beta=float(settings.get("beta", 3.0)),
            t_min=float(settings.get("t_min", 0.25)),
            strict=False,
        )
        n = int(settings["n"]) if "n" in settings else None
    except ValidationError as e:
        raise ConfigError(f"Invalid weight law: {format_validation_error(e)}") from e
    table = moments_table(model, max_exp_power=args.max_power, n=n if n and n >= 2 else None)
    print("=" * 60)
    print(f"Moments of Pareto(beta={model.beta:g}, t_min={model.t_min:g})")
    print("=" * 60)
    for name, value in table.items():
        print(f"{name:<24} {value:.12g}")
    verdict = "yes" if check_subcritical(model) else "no"
    print(f"{'subcritical':<24} {verdict} (E[W^2] = {model.second_moment:.12g}, E[W] = {model.mean:.12g})")
    return EXIT_PASS


# =====================================================
# Parser
# =====================================================

def add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--beta", type=float, help="tail exponent, > 2")
    parser.add_argument("--t-min", dest="t_min", type=float, help="Pareto scale")
    parser.add_argument("--kind", choices=["NR", "ENR", "CL", "GRG"], type=str.upper, help="graph model")
    parser.add_argument("--normalizer", choices=["Ln", "nEW"], help="Ln or nEW (primed models)")
    parser.add_argument("--n", type=int, help="vertices per graph")
    parser.add_argument("-R", "--replications", type=int, help="number of replications")
    parser.add_argument("--seed", dest="base_seed", type=int, help="base seed")
    parser.add_argument("--spec", dest="specs", action="append",
                        help="statistic: all, distance:m, degree:m, tree:<parents> (repeatable)")
    parser.add_argument("--interval", dest="intervals", action="append", help="interval a:b, b may be inf (repeatable)")
    parser.add_argument("--level", type=float, help="significance level")
    parser.add_argument("--path-cap", dest="path_cap", type=int, help="largest component examined for terminal trees")
    parser.add_argument("--max-ks-distance", dest="max_ks_distance", type=float)
    parser.add_argument("--control-max-ks-distance", dest="control_max_ks_distance", type=float)
    parser.add_argument("--a1-tolerance", dest="a1_tolerance", type=float)
    parser.add_argument("--output-dir", dest="output_dir", help="directory for artifacts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nr_simulator",
        description="Rank-1 inhomogeneous random graphs with Pareto weights and their extremal component statistics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    generate_parser = subparsers.add_parser("generate", help="write one graph and its weights")
    add_config_flags(generate_parser)
    generate_parser.add_argument("--edges", help="edge-list path (default <output_dir>/graph.edges)")
    generate_parser.add_argument("--weights", help="weights path (default <output_dir>/weights.txt)")
    generate_parser.set_defaults(handler=cmd_generate)

    xi_parser = subparsers.add_parser("xi", help="print the scaling constant xi")
    add_config_flags(xi_parser)
    xi_parser.set_defaults(handler=cmd_xi)

    verify_parser = subparsers.add_parser("verify", help="replicate and test the limit laws")
    add_config_flags(verify_parser)
    verify_parser.add_argument("--workers", type=int, help="worker processes (default NRSIM_WORKERS or 1)")
    verify_parser.add_argument("-q", "--quiet", action="store_true", help="no progress bar")
    verify_parser.set_defaults(handler=cmd_verify)

    tree_parser = subparsers.add_parser("tree", help="canonical form and automorphism count of a rooted tree")
    tree_parser.add_argument("tree", nargs="*", help="parent array (\"0 1 1\") or AHU string")
    tree_parser.add_argument("--enumerate", type=int, metavar="M", help="list every rooted tree with M vertices")
    tree_parser.set_defaults(handler=cmd_tree)

    moments_parser = subparsers.add_parser("moments", help="moment functionals of a weight law")
    add_config_flags(moments_parser)
    moments_parser.add_argument("--max-power", dest="max_power", type=int, default=4, help="largest m in E[W^m e^-W]")
    moments_parser.set_defaults(handler=cmd_moments)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("DEBUG" if args.verbose else None)

    parameters = {key: value for key, value in vars(args).items() if key != "handler" and value is not None}
    start = time.time()
    try:
        code = args.handler(args)
    except ValueError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        code, status, error = EXIT_USAGE, "error", str(e)
    except (SimulatorError, OSError) as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        code, status, error = EXIT_RUNTIME, "error", str(e)
    else:
        status, error = ("rejected" if code == EXIT_REJECT else "success"), None

    log_run_event(
        event=args.command,
        parameters=parameters,
        execution_time_ms=int((time.time() - start) * 1000),
        status=status,
        result_summary=f"exit code {code}",
        error_message=error,
    )
    return code


if __name__ == "__main__":
    sys.exit(main())
