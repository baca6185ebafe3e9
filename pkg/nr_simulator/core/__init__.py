# nr_simulator/core/__init__.py
"""
Core modules for weights, graph generation, component statistics and limit laws
"""
from .weights import WeightVector, sample_weights, moment, exp_moment, q_n
from .graphgen import MultiGraph, generate, erase
from .components import ComponentView, components, bfs_layers
from .trees import RootedTree, canonical_form, automorphism_count
from .statistics import count_statistic, statistic_per_component
from .limits import PointSet, xi, nu_beta, frechet_cdf, build_xi_n, build_theta_n
from .inference import ks_test, poisson_gof, run_replications

__all__ = [
    "WeightVector",
    "sample_weights",
    "moment",
    "exp_moment",
    "q_n",
    "MultiGraph",
    "generate",
    "erase",
    "ComponentView",
    "components",
    "bfs_layers",
    "RootedTree",
    "canonical_form",
    "automorphism_count",
    "count_statistic",
    "statistic_per_component",
    "PointSet",
    "xi",
    "nu_beta",
    "frechet_cdf",
    "build_xi_n",
    "build_theta_n",
    "ks_test",
    "poisson_gof",
    "run_replications"
]
