"""
Limits - Scaling constants xi, the intensity nu_beta, Frechet laws and point sets
"""

import logging
import math
import os
from typing import Dict, Iterable, Optional, Union

import numpy as np
import pandas as pd
from scipy import stats

from ..models.schemas import StatisticSpec, WeightModel, XiConstant
from .components import ComponentView
from .exceptions import ParameterError, SubcriticalityError
from .graphgen import MultiGraph
from .statistics import DEFAULT_PATH_CAP, statistic_per_component
from .trees import RootedTree, automorphism_count
from .weights import WeightVector, exp_moment, moment

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


# =====================================================
# Point sets
# =====================================================

class PointSet:
    """Finite multiset of positive reals, kept sorted in descending order"""

    def __init__(self, points: Iterable[float]):
        values = np.array(list(points) if not isinstance(points, np.ndarray) else points, dtype=np.float64)
        values = values.reshape(-1)
        if np.any(values < 0) or np.any(np.isnan(values)):
            raise ParameterError("Points must be non-negative numbers")
        # Points at zero carry no information
        values = -np.sort(-values[values > 0])
        values.setflags(write=False)
        self._points = values

    @property
    def points(self) -> np.ndarray:
        return self._points

    def __len__(self) -> int:
        return int(self._points.size)

    def interval_count(self, a: float, b: float = math.inf) -> int:
        """Number of points in the half-open interval (a, b]"""
        if a < 0 or not a < b:
            raise ParameterError(f"Interval ({a:g}, {b:g}] must satisfy 0 <= a < b")
        return int(np.count_nonzero((self._points > a) & (self._points <= b)))

    def max_point(self) -> Optional[float]:
        return self.kth_largest(1)

    def kth_largest(self, k: int) -> Optional[float]:
        """k-th largest point (k >= 1), None when fewer than k points"""
        if k < 1:
            raise ParameterError(f"k must be >= 1, got {k}")
        return float(self._points[k - 1]) if k <= len(self) else None

    def scaled(self, factor: float) -> "PointSet":
        if factor <= 0:
            raise ParameterError(f"Scale factor must be positive, got {factor}")
        return PointSet(self._points * factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return np.array_equal(self._points, other._points)

    def __repr__(self) -> str:
        return f"PointSet(size={len(self)}, max={self.max_point()})"

    def to_csv(self, path: str, header_lines: Iterable[str] = ()) -> None:
        """One column "point", descending, after '#' comment lines"""
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for line in header_lines:
                handle.write(f"# {line}\n")
            pd.DataFrame({"point": self._points}).to_csv(handle, index=False, float_format="%.17g")

    @classmethod
    def read_csv(cls, path: str) -> "PointSet":
        frame = pd.read_csv(path, comment="#", dtype={"point": np.float64})
        return cls(frame["point"].to_numpy())


def interval_count(ps: PointSet, a: float, b: float = math.inf) -> int:
    return ps.interval_count(a, b)


def max_point(ps: PointSet) -> Optional[float]:
    return ps.max_point()


# =====================================================
# Limit laws
# =====================================================

def nu_beta(a: float, b: float, beta: float) -> float:
    """
    Intensity measure of the limiting Poisson process: a^-beta - b^-beta

    Args:
        a: Left end, a > 0
        b: Right end, a < b <= inf
        beta: Tail exponent

    Returns:
        nu_beta((a, b])
    """
    if a <= 0 or not a < b:
        raise ParameterError(f"nu_beta needs 0 < a < b, got a={a:g}, b={b:g}")
    right = 0.0 if math.isinf(b) else b ** -beta
    return a ** -beta - right


def frechet_cdf(x: ArrayLike, beta: float) -> ArrayLike:
    """exp(-x^-beta) for x > 0, 0 otherwise"""
    if beta <= 0:
        raise ParameterError(f"Frechet parameter must be positive, got {beta}")
    x_arr = np.asarray(x, dtype=np.float64)
    positive = x_arr > 0
    with np.errstate(divide="ignore", over="ignore"):
        value = np.where(positive, np.exp(-np.where(positive, x_arr, 1.0) ** -beta), 0.0)
    return float(value) if value.ndim == 0 else value


def kth_largest_cdf(x: ArrayLike, k: int, beta: float) -> ArrayLike:
    """
    Law of the k-th largest point of the limiting Poisson process

    P(k-th largest <= x) = P(Poisson(x^-beta) < k); k = 1 gives frechet_cdf.

    Args:
        x: Point(s)
        k: Rank, k >= 1
        beta: Tail exponent

    Returns:
        Probability
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if beta <= 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    x_arr = np.asarray(x, dtype=np.float64)
    positive = x_arr > 0
    with np.errstate(divide="ignore", over="ignore"):
        mean = np.where(positive, np.where(positive, x_arr, 1.0) ** -beta, 1.0)
    value = np.where(positive, stats.poisson.cdf(k - 1, mean), 0.0)
    return float(value) if value.ndim == 0 else value


# =====================================================
# Scaling constants
# =====================================================

def xi(model: WeightModel, spec: StatisticSpec) -> XiConstant:
    """
    Scaling constant xi with E[S_n(v)] ~ xi * W_v for the statistic

    Args:
        model: Subcritical weight law
        spec: Statistic

    Returns:
        XiConstant with the moment values used
    """
    if not model.is_subcritical:
        raise SubcriticalityError(
            f"xi needs E[W^2] < E[W]; got E[W^2] = {model.second_moment:.12g} >= E[W] = {model.mean:.12g}"
        )
    mean = moment(model, 1)
    second = moment(model, 2)
    gap = mean - second
    used: Dict[str, float] = {"E[W]": mean, "E[W^2]": second}

    if spec.kind == "all":
        value = mean / gap
    elif spec.kind == "distance":
        value = (second / mean) ** (spec.m - 1)
    elif spec.kind == "degree":
        damped = exp_moment(model, spec.m)
        used[f"E[W^{spec.m} e^-W]"] = damped
        value = damped / (math.factorial(spec.m - 1) * gap)
    else:
        tree = RootedTree.from_canonical(spec.tree)
        degrees = tree.degrees
        damped_cache: Dict[int, float] = {}

        def damped_moment(power: int) -> float:
            if power not in damped_cache:
                damped_cache[power] = exp_moment(model, power)
                used[f"E[W^{power} e^-W]"] = damped_cache[power]
            return damped_cache[power]

        c = automorphism_count(tree)
        used["c(T)"] = float(c)
        value = damped_moment(degrees[0] + 1) / gap / c
        for d in degrees[1:]:
            value *= damped_moment(d) / mean

    logger.debug(f"xi({spec.label}) = {value:.12g} for beta={model.beta}, t_min={model.t_min}")
    return XiConstant(value=value, spec=spec, model=model, moments=used)


# =====================================================
# Empirical point processes
# =====================================================

def build_xi_n(
    g: MultiGraph,
    weights: WeightVector,
    view: ComponentView,
    spec: StatisticSpec,
    xi_const: Union[XiConstant, float],
    qn: float,
    path_cap: int = DEFAULT_PATH_CAP,
) -> PointSet:
    """
    Points S_n(v) / (q(n) xi), one per component, v its representative

    Args:
        g: Graph
        weights: Vertex weights
        view: Component partition of g under weights
        spec: Statistic
        xi_const: xi (an XiConstant or a plain positive number)
        qn: Scaling q(n) > 0
        path_cap: Largest component examined for terminal trees

    Returns:
        PointSet without zero points
    """
    xi_value = xi_const.value if isinstance(xi_const, XiConstant) else float(xi_const)
    if qn <= 0 or xi_value <= 0:
        raise ParameterError(f"q(n) and xi must be positive, got q(n)={qn}, xi={xi_value}")
    if weights.n != g.n:
        raise ParameterError(f"Weight vector has {weights.n} entries but graph has {g.n} vertices")
    values = statistic_per_component(g, view, spec, path_cap)
    return PointSet(values / (qn * xi_value))


def build_theta_n(weights: WeightVector, qn: float) -> PointSet:
    """Rescaled weights W_v / q(n)"""
    if qn <= 0:
        raise ParameterError(f"q(n) must be positive, got {qn}")
    return PointSet(weights.weights / qn)
