"""
Components - Connected components, max-weight representatives and BFS layers
"""

import logging
from collections import deque
from typing import Dict, List

import numpy as np

from .exceptions import ParameterError
from .graphgen import MultiGraph
from .weights import WeightVector

logger = logging.getLogger(__name__)


class UnionFind:
    """Disjoint sets over 0..n-1 with union by rank and path compression"""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        # Compress the path behind us
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        x_root = self.find(x)
        y_root = self.find(y)
        if x_root == y_root:
            return
        if self.rank[x_root] < self.rank[y_root]:
            self.parent[x_root] = y_root
        elif self.rank[x_root] > self.rank[y_root]:
            self.parent[y_root] = x_root
        else:
            self.parent[y_root] = x_root
            self.rank[x_root] += 1

    def is_same(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def __repr__(self) -> str:
        return f"UnionFind(n={len(self.parent)})"


class ComponentView:
    """Partition of the vertices into components, numbered by their smallest vertex"""

    def __init__(self, component_id: np.ndarray, weights: WeightVector):
        """
        Initialize from per-vertex component ids 0..k-1

        Args:
            component_id: Component index of each vertex
            weights: Vertex weights, used for representatives
        """
        component_id = np.asarray(component_id, dtype=np.int64)
        component_id.setflags(write=False)
        self._component_id = component_id
        count = int(component_id.max()) + 1 if component_id.size else 0

        order = np.argsort(component_id, kind="stable")
        sizes = np.bincount(component_id, minlength=count)
        self._members = np.split(order, np.cumsum(sizes)[:-1]) if count else []
        self._sizes = sizes

        # Max weight first, then smallest label, within each component
        vertices = np.arange(component_id.size)
        ranked = np.lexsort((vertices, -weights.weights, component_id))
        starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        self._representative = ranked[starts] if count else np.zeros(0, dtype=np.int64)

    @property
    def component_id(self) -> np.ndarray:
        return self._component_id

    @property
    def count(self) -> int:
        return int(self._sizes.size)

    @property
    def sizes(self) -> np.ndarray:
        return self._sizes

    @property
    def members(self) -> List[np.ndarray]:
        return self._members

    @property
    def representative(self) -> np.ndarray:
        """Max-weight vertex per component, smallest label among ties"""
        return self._representative

    def component_of(self, v: int) -> int:
        return int(self._component_id[v])

    def members_of(self, v: int) -> np.ndarray:
        return self._members[self.component_of(v)]

    def size_of(self, v: int) -> int:
        return int(self._sizes[self.component_of(v)])

    def is_representative(self, v: int) -> bool:
        return int(self._representative[self.component_of(v)]) == v

    def __repr__(self) -> str:
        largest = int(self._sizes.max()) if self.count else 0
        return f"ComponentView(components={self.count}, largest={largest})"


def components(g: MultiGraph, weights: WeightVector) -> ComponentView:
    """
    Component partition via union-find with max-weight representatives

    Args:
        g: Graph (multiplicities and loops are irrelevant)
        weights: Vertex weights, length g.n

    Returns:
        ComponentView
    """
    if weights.n != g.n:
        raise ParameterError(f"Weight vector has {weights.n} entries but graph has {g.n} vertices")

    uf = UnionFind(g.n)
    us, vs, _ = g.edges()
    for u, v in zip(us.tolist(), vs.tolist()):
        uf.union(u, v)

    roots = np.fromiter((uf.find(x) for x in range(g.n)), dtype=np.int64, count=g.n)
    # Number components in order of their smallest vertex
    _, first_seen, inverse = np.unique(roots, return_index=True, return_inverse=True)
    rank = np.empty(first_seen.size, dtype=np.int64)
    rank[np.argsort(first_seen, kind="stable")] = np.arange(first_seen.size)
    view = ComponentView(rank[inverse.reshape(-1)], weights)
    logger.debug(f"{view}")
    return view


def bfs_layers(g: MultiGraph, v: int) -> Dict[int, int]:
    """
    Graph distances from v, ignoring multiplicities and loops

    Args:
        g: Graph
        v: Source vertex

    Returns:
        Mapping vertex -> distance for every vertex reachable from v;
        unreachable vertices are absent
    """
    g.neighbors(v)  # validates v
    adjacency = g.adjacency_lists()
    distance = {v: 0}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        next_distance = distance[x] + 1
        for y in adjacency[x]:
            if y not in distance:
                distance[y] = next_distance
                queue.append(y)
    return distance


def top_weight_vertex(weights: WeightVector) -> int:
    """Vertex carrying W_(n), smallest label among ties"""
    return weights.argmax
