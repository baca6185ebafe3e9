"""
Weights - Pareto weight laws, quantiles, sampling and the moment functionals behind xi
"""

import logging
import math
from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from ..models.schemas import WeightModel
from .exceptions import ParameterError, QuadratureError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# Adaptive quadrature settings
QUAD_RELATIVE_TOLERANCE = 1e-10
QUAD_SUBDIVISION_LIMIT = 500

# Warnings from QUADPACK are tolerated while the error estimate stays below this
QUAD_ACCEPTED_TOLERANCE = 1e-9


# =====================================================
# Weight vector
# =====================================================

class WeightVector:
    """Per-vertex weights W_1..W_n (stored 0-based) with the cached total L_n"""

    def __init__(self, weights: ArrayLike):
        """
        Initialize weight vector

        Args:
            weights: Positive weights, entry i belongs to vertex label i+1
        """
        values = np.array(weights, dtype=np.float64).reshape(-1)
        if values.size and not np.all(values > 0):
            raise ParameterError("All weights must be strictly positive")
        if not np.all(np.isfinite(values)):
            raise ParameterError("All weights must be finite")

        values.setflags(write=False)
        self._weights = values
        self._total = math.fsum(values)

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def total(self) -> float:
        """L_n = sum of all weights"""
        return self._total

    @property
    def n(self) -> int:
        return int(self._weights.size)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, index):
        return self._weights[index]

    @property
    def max_weight(self) -> float:
        """W_(n); 0 for an empty vector"""
        return float(self._weights.max()) if self.n else 0.0

    @property
    def argmax(self) -> int:
        """Vertex with the largest weight, smallest label among ties"""
        if not self.n:
            raise ParameterError("Empty weight vector has no maximum")
        return int(np.argmax(self._weights))

    def __repr__(self) -> str:
        return f"WeightVector(n={self.n}, total={self._total:.6g})"


# =====================================================
# Distribution functions
# =====================================================

def tail_prob(model: WeightModel, t: ArrayLike) -> ArrayLike:
    """P(W > t) = (t_min/t)^beta for t >= t_min, 1 below the support"""
    t_arr = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore"):
        tail = np.where(t_arr < model.t_min, 1.0, (model.t_min / np.maximum(t_arr, model.t_min)) ** model.beta)
    return float(tail) if tail.ndim == 0 else tail


def cdf(model: WeightModel, t: ArrayLike) -> ArrayLike:
    """F(t) = P(W <= t)"""
    tail = tail_prob(model, t)
    return 1.0 - tail


def pdf(model: WeightModel, t: ArrayLike) -> ArrayLike:
    """Density beta * t_min^beta * t^(-beta-1) on [t_min, inf)"""
    t_arr = np.asarray(t, dtype=np.float64)
    density = np.where(
        t_arr < model.t_min,
        0.0,
        model.beta * model.t_min ** model.beta * np.maximum(t_arr, model.t_min) ** (-model.beta - 1.0),
    )
    return float(density) if density.ndim == 0 else density


def quantile(model: WeightModel, p: ArrayLike) -> ArrayLike:
    """
    Quantile function F^{-1}(p) = t_min * (1-p)^(-1/beta)

    Args:
        model: Weight law
        p: Probability in (0, 1)

    Returns:
        Weight(s) at probability p
    """
    p_arr = np.asarray(p, dtype=np.float64)
    if np.any((p_arr <= 0.0) | (p_arr >= 1.0)) or np.any(np.isnan(p_arr)):
        raise ParameterError(f"Quantile probability must lie in (0, 1), got {p}")
    value = model.t_min * (1.0 - p_arr) ** (-1.0 / model.beta)
    return float(value) if value.ndim == 0 else value


def q_n(model: WeightModel, n: int) -> float:
    """
    Scaling q(n) = F^{-1}(1 - 1/n); equals t_min * n^(1/beta) for Pareto

    Args:
        model: Weight law
        n: Graph size, n >= 2

    Returns:
        q(n)
    """
    if n < 2:
        raise ParameterError(f"q(n) requires n >= 2, got {n}")
    # (1 - (1 - 1/n)) loses digits for large n; use the closed form
    return model.t_min * float(n) ** (1.0 / model.beta)


# =====================================================
# Sampling
# =====================================================

def sample_weights(model: WeightModel, n: int, rng: np.random.Generator) -> WeightVector:
    """
    Draw n i.i.d. weights by inverse CDF, W = t_min * U^(-1/beta)

    Args:
        model: Weight law
        n: Number of vertices (>= 1)
        rng: Random stream

    Returns:
        WeightVector
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    # rng.random() is in [0, 1); 1 - U is in (0, 1]
    uniforms = 1.0 - rng.random(n)
    return WeightVector(model.t_min * uniforms ** (-1.0 / model.beta))


# =====================================================
# Moments
# =====================================================

def moment(model: WeightModel, k: float) -> float:
    """
    E[W^k] = beta * t_min^k / (beta - k)

    Args:
        model: Weight law
        k: Order, 0 <= k < beta

    Returns:
        k-th moment
    """
    if k < 0:
        raise ParameterError(f"Moment order must be non-negative, got {k}")
    if k >= model.beta:
        raise ParameterError(f"E[W^{k:g}] is infinite for beta = {model.beta:g} (need k < beta)")
    return model.beta * model.t_min ** k / (model.beta - k)


def _check_quad_result(result: tuple, what: str) -> float:
    value, abserr = result[0], result[1]
    achieved = abserr / abs(value) if value else abserr
    if len(result) > 3 and achieved > QUAD_ACCEPTED_TOLERANCE:
        raise QuadratureError(f"Quadrature for {what} did not converge: {result[3].splitlines()[0]}", achieved)
    return value


def moment_by_quadrature(model: WeightModel, k: float) -> float:
    """
    E[W^k] by adaptive quadrature, independent of the closed form

    Substituting W = t_min * U^(-1/beta) turns the slowly decaying tail into
    the integrable endpoint singularity u^(-k/beta) on (0, 1].

    Args:
        model: Weight law
        k: Order, 0 <= k < beta

    Returns:
        k-th moment
    """
    if k >= model.beta:
        raise ParameterError(f"E[W^{k:g}] is infinite for beta = {model.beta:g} (need k < beta)")
    exponent = -1.0 / model.beta

    def integrand(u: float) -> float:
        return (model.t_min * u ** exponent) ** k

    result = integrate.quad(
        integrand, 0.0, 1.0,
        epsabs=0.0, epsrel=QUAD_RELATIVE_TOLERANCE, limit=QUAD_SUBDIVISION_LIMIT, full_output=1,
    )
    return _check_quad_result(result, f"E[W^{k:g}]")


def expectation(model: WeightModel, func: Callable[[float], float], what: str = "E[g(W)]") -> float:
    """
    E[func(W)] by adaptive quadrature of func * density over [t_min, inf)

    Args:
        model: Weight law
        func: Integrand in the weight variable
        what: Label used in error messages

    Returns:
        Expectation
    """
    coefficient = model.beta * model.t_min ** model.beta

    def integrand(w: float) -> float:
        return func(w) * coefficient * w ** (-model.beta - 1.0)

    result = integrate.quad(
        integrand, model.t_min, np.inf,
        epsabs=0.0, epsrel=QUAD_RELATIVE_TOLERANCE, limit=QUAD_SUBDIVISION_LIMIT, full_output=1,
    )
    return _check_quad_result(result, what)


def exp_moment(model: WeightModel, m: int) -> float:
    """
    E[W^m e^{-W}] by adaptive quadrature

    Args:
        model: Weight law
        m: Power, m >= 0

    Returns:
        Exponentially damped moment
    """
    if m < 0:
        raise ParameterError(f"Exponent m must be >= 0, got {m}")
    return expectation(model, lambda w: w ** m * math.exp(-w), what=f"E[W^{m} e^-W]")


def check_subcritical(model: WeightModel) -> bool:
    """True iff E[W^2] < E[W]"""
    return moment(model, 2) < moment(model, 1)


def moments_table(model: WeightModel, max_exp_power: int = 4, n: Optional[int] = None) -> Dict[str, float]:
    """
    Moment functionals of a weight law, keyed by a printable label

    Args:
        model: Weight law (strict or not)
        max_exp_power: Largest m for E[W^m e^{-W}]
        n: Optional graph size for q(n)

    Returns:
        Ordered mapping label -> value
    """
    table: Dict[str, float] = {}
    k = 1
    while k < model.beta:
        table[f"E[W^{k}]"] = moment(model, k)
        table[f"E[W^{k}] (quadrature)"] = moment_by_quadrature(model, k)
        k += 1
    for m in range(max_exp_power + 1):
        table[f"E[W^{m} e^-W]"] = exp_moment(model, m)
    if n is not None:
        table[f"q({n})"] = q_n(model, n)
    logger.debug(f"Moment table for beta={model.beta} t_min={model.t_min}: {len(table)} entries")
    return table
