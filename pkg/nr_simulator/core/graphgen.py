"""
Graph Generation - Norros-Reittu multigraphs and their simple variants

Vertices are 0-based internally; edge-list files use 1-based labels.
"""

import logging
import math
import os
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from ..models.schemas import ModelKind, WeightModel
from .exceptions import GraphInvariantError, ParameterError, VertexError
from .sampling import AliasTable, UniformStream
from .weights import WeightVector

logger = logging.getLogger(__name__)


# =====================================================
# MultiGraph
# =====================================================

class MultiGraph:
    """Undirected multigraph in CSR form with per-vertex loop counts"""

    def __init__(
        self,
        n: int,
        indptr: np.ndarray,
        indices: np.ndarray,
        multiplicities: np.ndarray,
        loop_counts: np.ndarray,
        label: str = "NR",
    ):
        """
        Initialize from CSR arrays; use from_edges to build from an edge list

        Args:
            n: Vertex count
            indptr: Row pointers, length n + 1
            indices: Neighbor ids, sorted within each row, no self entries
            multiplicities: Multiplicity per (row, neighbor) entry, all >= 1
            loop_counts: Loops per vertex
            label: Model label recorded in exports
        """
        self._n = int(n)
        self._indptr = np.asarray(indptr, dtype=np.int64)
        self._indices = np.asarray(indices, dtype=np.int64)
        self._multiplicities = np.asarray(multiplicities, dtype=np.int64)
        self._loops = np.asarray(loop_counts, dtype=np.int64)
        for array in (self._indptr, self._indices, self._multiplicities, self._loops):
            array.setflags(write=False)
        self.label = label
        self._edge_total = int(self._multiplicities.sum() // 2 + self._loops.sum())
        self._adjacency_lists = None

    @classmethod
    def from_edges(
        cls,
        n: int,
        us: Iterable[int],
        vs: Iterable[int],
        multiplicities: Optional[Iterable[int]] = None,
        label: str = "NR",
    ) -> "MultiGraph":
        """
        Build from parallel endpoint arrays; repeated pairs add up, u == v is a loop

        Args:
            n: Vertex count
            us, vs: 0-based endpoints
            multiplicities: Optional multiplicity per entry (default 1)
            label: Model label

        Returns:
            MultiGraph
        """
        us = np.asarray(list(us) if not isinstance(us, np.ndarray) else us, dtype=np.int64)
        vs = np.asarray(list(vs) if not isinstance(vs, np.ndarray) else vs, dtype=np.int64)
        if us.shape != vs.shape:
            raise ParameterError("Endpoint arrays must have equal length")
        if multiplicities is None:
            mults = np.ones(us.size, dtype=np.int64)
        else:
            mults = np.asarray(
                list(multiplicities) if not isinstance(multiplicities, np.ndarray) else multiplicities,
                dtype=np.int64,
            )
        if us.size and (min(us.min(), vs.min()) < 0 or max(us.max(), vs.max()) >= n):
            raise VertexError(f"Edge endpoint outside 0..{n - 1}")
        if np.any(mults < 0):
            raise ParameterError("Multiplicities must be non-negative")

        keep = mults > 0
        us, vs, mults = us[keep], vs[keep], mults[keep]

        is_loop = us == vs
        loop_counts = np.bincount(us[is_loop], weights=mults[is_loop], minlength=n).astype(np.int64)

        low = np.minimum(us[~is_loop], vs[~is_loop])
        high = np.maximum(us[~is_loop], vs[~is_loop])
        keys, inverse = np.unique(low * np.int64(max(n, 1)) + high, return_inverse=True)
        pair_mults = np.bincount(inverse, weights=mults[~is_loop], minlength=keys.size).astype(np.int64)
        low = keys // max(n, 1)
        high = keys % max(n, 1)

        # Symmetric CSR with rows sorted by neighbor id
        sources = np.concatenate([low, high])
        targets = np.concatenate([high, low])
        both_mults = np.concatenate([pair_mults, pair_mults])
        order = np.lexsort((targets, sources))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(sources, minlength=n), out=indptr[1:])
        return cls(n, indptr, targets[order], both_mults[order], loop_counts, label=label)

    # --------------------------------------------------
    # Accessors
    # --------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def indptr(self) -> np.ndarray:
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def multiplicities(self) -> np.ndarray:
        return self._multiplicities

    @property
    def loop_counts(self) -> np.ndarray:
        return self._loops

    @property
    def edge_total(self) -> int:
        """Total number of edges counted with multiplicity, loops included"""
        return self._edge_total

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self._n:
            raise VertexError(f"Vertex {v} outside 0..{self._n - 1}")

    def neighbors(self, v: int) -> np.ndarray:
        """Distinct neighbors of v (loops excluded), sorted"""
        self._check_vertex(v)
        return self._indices[self._indptr[v]:self._indptr[v + 1]]

    def adjacency_lists(self):
        """Neighbor lists as Python lists, built once for traversals"""
        if self._adjacency_lists is None:
            flat = self._indices.tolist()
            bounds = self._indptr.tolist()
            self._adjacency_lists = [flat[bounds[v]:bounds[v + 1]] for v in range(self._n)]
        return self._adjacency_lists

    def multiplicity(self, x: int, y: int) -> int:
        """Number of edges between x and y (loops when x == y)"""
        self._check_vertex(x)
        self._check_vertex(y)
        if x == y:
            return int(self._loops[x])
        start, stop = self._indptr[x], self._indptr[x + 1]
        position = start + np.searchsorted(self._indices[start:stop], y)
        if position < stop and self._indices[position] == y:
            return int(self._multiplicities[position])
        return 0

    def degree(self, v: int) -> int:
        """Number of distinct neighbors, loops and multiplicities ignored"""
        self._check_vertex(v)
        return int(self._indptr[v + 1] - self._indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def edges(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Non-loop edges as (u, v, multiplicity) arrays with u < v"""
        rows = np.repeat(np.arange(self._n, dtype=np.int64), np.diff(self._indptr))
        upper = rows < self._indices
        return rows[upper], self._indices[upper], self._multiplicities[upper]

    @property
    def is_simple(self) -> bool:
        return not self._loops.any() and not np.any(self._multiplicities > 1)

    def __repr__(self) -> str:
        return f"MultiGraph(n={self._n}, edge_total={self._edge_total}, label={self.label!r})"


def degree(g: MultiGraph, v: int) -> int:
    """Number of distinct neighbors of v, loops excluded"""
    return g.degree(v)


def erase(g: MultiGraph) -> MultiGraph:
    """Cap multiplicities at 1 and drop loops; the vertex set is unchanged"""
    return MultiGraph(
        g.n,
        g.indptr,
        g.indices,
        np.ones_like(g.indices),
        np.zeros(g.n, dtype=np.int64),
        label="E" + g.label if g.label.startswith("NR") else g.label,
    )


def audit(g: MultiGraph) -> None:
    """
    Structural audit: symmetry, positive multiplicities, sorted rows, edge total

    Raises:
        GraphInvariantError: on the first violated invariant
    """
    rows = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    mults = g.multiplicities
    if g.indptr[0] != 0 or g.indptr[-1] != g.indices.size:
        raise GraphInvariantError("Row pointers do not cover the index array")
    if np.any(mults < 1):
        raise GraphInvariantError("Stored multiplicities must be >= 1")
    if np.any(rows == g.indices):
        raise GraphInvariantError("Loops must live in loop_counts, not in adjacency")
    if np.any(g.loop_counts < 0):
        raise GraphInvariantError("Negative loop count")
    forward = np.lexsort((g.indices, rows))
    if not np.array_equal(forward, np.arange(rows.size)):
        raise GraphInvariantError("Adjacency rows must be sorted by neighbor id")
    backward = np.lexsort((rows, g.indices))
    if not (np.array_equal(g.indices[backward], rows) and np.array_equal(mults[backward], mults)):
        raise GraphInvariantError("Adjacency is not symmetric")
    expected_total = int(mults[rows < g.indices].sum() + g.loop_counts.sum())
    if g.edge_total != expected_total:
        raise GraphInvariantError(f"edge_total {g.edge_total} != {expected_total}")


# =====================================================
# Generators
# =====================================================

def normalizing_constant(weights: WeightVector, normalizer: str, model: Optional[WeightModel] = None) -> float:
    """
    D in p_ij = W_iW_j / D: L_n for "Ln", n * E[W] for "nEW"

    Args:
        weights: Vertex weights
        normalizer: "Ln" or "nEW"
        model: Weight law; required for "nEW" (analytic E[W])

    Returns:
        D
    """
    if normalizer == "Ln":
        return weights.total
    if normalizer == "nEW":
        if model is None:
            raise ParameterError("Normalizer nEW needs the weight model for E[W]")
        return weights.n * model.mean
    raise ParameterError(f"Unknown normalizer '{normalizer}' (use Ln or nEW)")


def edge_probability(p: np.ndarray, kind: str) -> np.ndarray:
    """
    Connection probability of distinct vertices given p = W_iW_j / D

    Args:
        p: Rate(s)
        kind: ENR (1 - e^-p), CL (min(1, p)) or GRG (p / (1 + p))
    """
    p = np.asarray(p, dtype=np.float64)
    if kind == "ENR":
        return -np.expm1(-p)
    if kind == "CL":
        return np.minimum(1.0, p)
    if kind == "GRG":
        return p / (1.0 + p)
    raise ParameterError(f"No simple edge probability for kind '{kind}'")


def generate_nr(
    weights: WeightVector,
    normalizer: str,
    rng: np.random.Generator,
    model: Optional[WeightModel] = None,
) -> MultiGraph:
    """
    Norros-Reittu multigraph in O(n + edges)

    A Poisson(L_n^2 / (2D)) number of edges gets both endpoints drawn i.i.d.
    proportional to W. That gives rate W_xW_y/D per pair x != y and W_x^2/(2D)
    per loop; an extra Poisson(W_x^2/(2D)) per vertex restores the loop rate W_x^2/D.

    Args:
        weights: Vertex weights
        normalizer: "Ln" or "nEW"
        rng: Random stream
        model: Weight law (needed for "nEW")

    Returns:
        MultiGraph with loops and multi-edges
    """
    n = weights.n
    if n < 1:
        raise ParameterError("Graph needs n >= 1")
    scale = normalizing_constant(weights, normalizer, model)
    w = weights.weights
    label = "NR" + ("'" if normalizer == "nEW" else "")

    edge_count = int(rng.poisson(weights.total ** 2 / (2.0 * scale)))
    ends = AliasTable(w).sample(2 * edge_count, rng).reshape(edge_count, 2)
    extra_loops = rng.poisson(w * w / (2.0 * scale))

    loop_vertices = np.flatnonzero(extra_loops)
    us = np.concatenate([ends[:, 0], loop_vertices])
    vs = np.concatenate([ends[:, 1], loop_vertices])
    mults = np.concatenate([np.ones(edge_count, dtype=np.int64), extra_loops[loop_vertices]])
    graph = MultiGraph.from_edges(n, us, vs, mults, label=label)
    logger.debug(f"Generated {label} graph: n={n}, edges={graph.edge_total}")
    return graph


def generate_nr_naive(
    weights: WeightVector,
    normalizer: str,
    rng: np.random.Generator,
    model: Optional[WeightModel] = None,
) -> MultiGraph:
    """Reference O(n^2) Norros-Reittu generator: one Poisson draw per pair and per loop"""
    n = weights.n
    scale = normalizing_constant(weights, normalizer, model)
    w = weights.weights
    us, vs = np.triu_indices(n, k=1)
    pair_mults = rng.poisson(w[us] * w[vs] / scale)
    loops = rng.poisson(w * w / scale)
    label = "NR" + ("'" if normalizer == "nEW" else "")
    return MultiGraph.from_edges(
        n,
        np.concatenate([us, np.arange(n)]),
        np.concatenate([vs, np.arange(n)]),
        np.concatenate([pair_mults, loops]),
        label=label,
    )


def generate_simple(
    weights: WeightVector,
    kind: str,
    normalizer: str,
    rng: np.random.Generator,
    model: Optional[WeightModel] = None,
) -> MultiGraph:
    """
    ENR, CL or GRG simple graph with independent Bernoulli edges

    Vertices are visited in order of decreasing weight. Within a row the bound
    min(1, W_xW_y/D) is non-increasing, so geometric skips at the current bound
    jump over rejected pairs; each landed candidate is kept with probability
    true/bound. Expected work is O(n + edges).

    Args:
        weights: Vertex weights
        kind: "ENR", "CL" or "GRG"
        normalizer: "Ln" or "nEW"
        rng: Random stream
        model: Weight law (needed for "nEW")

    Returns:
        Simple MultiGraph (no loops, multiplicities 1)
    """
    if kind not in ("ENR", "CL", "GRG"):
        raise ParameterError(f"generate_simple supports ENR, CL, GRG, got '{kind}'")
    n = weights.n
    if n < 1:
        raise ParameterError("Graph needs n >= 1")
    scale = normalizing_constant(weights, normalizer, model)

    order = np.argsort(-weights.weights, kind="stable")
    w = weights.weights[order].tolist()
    uniforms = UniformStream(rng)

    if kind == "ENR":
        def accept(rate: float) -> float:
            return -math.expm1(-rate)
    elif kind == "GRG":
        def accept(rate: float) -> float:
            return rate / (1.0 + rate)
    else:
        def accept(rate: float) -> float:
            return min(1.0, rate)

    sources = []
    targets = []
    for i in range(n - 1):
        w_i = w[i] / scale
        j = i + 1
        bound = min(1.0, w_i * w[j])
        while j < n:
            if bound < 1.0:
                j += int(math.log(uniforms.next()) / math.log1p(-bound))
                if j >= n:
                    break
            rate = w_i * w[j]
            candidate = min(1.0, rate)
            if uniforms.next() <= accept(rate) / bound:
                sources.append(i)
                targets.append(j)
            bound = candidate
            j += 1

    sources = order[np.asarray(sources, dtype=np.int64)]
    targets = order[np.asarray(targets, dtype=np.int64)]
    label = kind + ("'" if normalizer == "nEW" else "")
    graph = MultiGraph.from_edges(n, sources, targets, label=label)
    logger.debug(f"Generated {label} graph: n={n}, edges={graph.edge_total}")
    return graph


def generate(
    weights: WeightVector,
    model_kind: ModelKind,
    rng: np.random.Generator,
    model: Optional[WeightModel] = None,
) -> MultiGraph:
    """Dispatch to the generator of model_kind"""
    if model_kind.kind == "NR":
        return generate_nr(weights, model_kind.normalizer, rng, model)
    return generate_simple(weights, model_kind.kind, model_kind.normalizer, rng, model)


# =====================================================
# Edge-list and weight files
# =====================================================

def _read_header(path: str) -> Dict[str, str]:
    meta: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            for token in line[1:].split():
                key, sep, value = token.partition("=")
                if sep:
                    meta[key] = value
    return meta


def write_edge_list(path: str, g: MultiGraph, header_lines: Iterable[str] = ()) -> None:
    """
    Write "u v multiplicity" lines (1-based), loops as "u u m", after a header

    Args:
        path: Output file
        g: Graph
        header_lines: Extra comment lines (without the leading '#')
    """
    us, vs, mults = g.edges()
    loop_vertices = np.flatnonzero(g.loop_counts)
    frame = pd.DataFrame({
        "u": np.concatenate([us, loop_vertices]) + 1,
        "v": np.concatenate([vs, loop_vertices]) + 1,
        "m": np.concatenate([mults, g.loop_counts[loop_vertices]]),
    }).sort_values(["u", "v"], kind="stable")

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"# n={g.n} model={g.label}\n")
        for line in header_lines:
            handle.write(f"# {line}\n")
        frame.to_csv(handle, sep=" ", header=False, index=False)


def read_edge_list(path: str) -> MultiGraph:
    """Read a file produced by write_edge_list"""
    meta = _read_header(path)
    if "n" not in meta:
        raise ParameterError(f"{path}: header line '# n=<n> model=<kind>' missing")
    try:
        frame = pd.read_csv(path, sep=" ", comment="#", header=None, names=["u", "v", "m"], dtype=np.int64)
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame({"u": [], "v": [], "m": []}, dtype=np.int64)
    n = int(meta["n"])
    return MultiGraph.from_edges(
        n,
        frame["u"].to_numpy() - 1,
        frame["v"].to_numpy() - 1,
        frame["m"].to_numpy(),
        label=meta.get("model", "NR"),
    )


def write_weights(path: str, weights: WeightVector, header_lines: Iterable[str] = ()) -> None:
    """One weight per line (vertex order), full precision, after a header"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"# n={weights.n}\n")
        for line in header_lines:
            handle.write(f"# {line}\n")
        pd.DataFrame({"w": weights.weights}).to_csv(handle, header=False, index=False, float_format="%.17g")


def read_weights(path: str) -> WeightVector:
    """Read a file produced by write_weights"""
    frame = pd.read_csv(path, comment="#", header=None, names=["w"], dtype=np.float64)
    return WeightVector(frame["w"].to_numpy())
