"""
Statistics - Per-component counting statistics S_n(v)

Four classes of counted vertices inside the component of v:
    all         every vertex of the component, v included
    distance:m  vertices at graph distance exactly m from v
    degree:m    vertices with m distinct neighbors, v included
    tree:T      roots of terminal copies of the rooted tree T
"""

import itertools
import logging
from collections import deque
from typing import Dict, List, Optional, Set

import numpy as np

from ..models.schemas import StatisticSpec
from .components import ComponentView, bfs_layers
from .exceptions import ComponentTooLargeError, ParameterError
from .graphgen import MultiGraph
from .trees import RootedTree, ahu_code

logger = logging.getLogger(__name__)

# Default largest component examined for terminal trees
DEFAULT_PATH_CAP = 10_000

# Largest component the exhaustive oracle accepts
BRUTE_FORCE_MAX_VERTICES = 12


def parse_statistic_spec(text: str) -> StatisticSpec:
    """Parse "all", "distance:2", "degree:1" or "tree:<parents or AHU string>" """
    try:
        return StatisticSpec.parse(text)
    except ValueError as e:
        raise ParameterError(str(e)) from e


# =====================================================
# Single vertex
# =====================================================

def count_statistic(
    g: MultiGraph,
    view: ComponentView,
    v: int,
    spec: StatisticSpec,
    path_cap: int = DEFAULT_PATH_CAP,
) -> int:
    """
    S_n(v) for one statistic

    Args:
        g: Graph
        view: Its component partition
        v: Vertex whose component is counted
        spec: Statistic
        path_cap: Largest component examined for terminal trees

    Returns:
        Count
    """
    g.neighbors(v)  # validates v
    if spec.kind == "all":
        return view.size_of(v)
    if spec.kind == "distance":
        return sum(1 for d in bfs_layers(g, v).values() if d == spec.m)
    if spec.kind == "degree":
        members = view.members_of(v)
        return int(np.count_nonzero(g.degrees()[members] == spec.m))
    return count_terminal_trees(g, view, v, RootedTree.from_canonical(spec.tree), path_cap)


def count_terminal_trees(
    g: MultiGraph,
    view: ComponentView,
    v: int,
    tree: RootedTree,
    path_cap: int = DEFAULT_PATH_CAP,
) -> int:
    """
    Number of x in C_n(v) that root a terminal copy of tree

    x ranges over C_n(v) without v itself and qualifies when the simple path
    from v to x is unique and the part of the component hanging below x
    (everything reachable from x once its path predecessor is removed) is a
    tree isomorphic to the pattern, rooted at x.
    A vertex has a unique simple path from v iff the DFS tree path to it uses
    bridges only, and then the part below x is exactly its DFS subtree.

    Args:
        g: Graph (loops and multiplicities ignored)
        view: Its component partition
        v: Start vertex
        tree: Rooted tree pattern
        path_cap: Largest component examined

    Returns:
        Count
    """
    size = view.size_of(v)
    if size > path_cap:
        raise ComponentTooLargeError(size, path_cap)

    adjacency = g.adjacency_lists()

    # Iterative Tarjan DFS: discovery times, low links, DFS parents
    disc: Dict[int, int] = {v: 0}
    low: Dict[int, int] = {v: 0}
    parent: Dict[int, int] = {v: -1}
    order = [v]
    stack = [(v, iter(adjacency[v]))]
    while stack:
        x, neighbors = stack[-1]
        advanced = False
        for y in neighbors:
            if y not in disc:
                disc[y] = low[y] = len(order)
                parent[y] = x
                order.append(y)
                stack.append((y, iter(adjacency[y])))
                advanced = True
                break
            if y != parent[x]:
                low[x] = min(low[x], disc[y])
        if not advanced:
            stack.pop()
            if stack:
                above = stack[-1][0]
                low[above] = min(low[above], low[x])

    children: Dict[int, List[int]] = {x: [] for x in order}
    subtree_size = {x: 1 for x in order}
    degree_sum = {x: len(adjacency[x]) for x in order}
    for x in reversed(order[1:]):
        p = parent[x]
        children[p].append(x)
        subtree_size[p] += subtree_size[x]
        degree_sum[p] += degree_sum[x]

    unique_path = {v: True}
    for x in order[1:]:
        p = parent[x]
        unique_path[x] = unique_path[p] and low[x] > disc[p]

    m = tree.m
    count = 0
    for x in order[1:]:
        if not unique_path[x] or subtree_size[x] != m:
            continue
        # The bridge to the predecessor is counted once in degree_sum
        if (degree_sum[x] - 1) // 2 != m - 1:
            continue
        if ahu_code(x, children.__getitem__) == tree.canonical:
            count += 1
    return count


# =====================================================
# Every component
# =====================================================

def statistic_per_component(
    g: MultiGraph,
    view: ComponentView,
    spec: StatisticSpec,
    path_cap: int = DEFAULT_PATH_CAP,
) -> np.ndarray:
    """
    S_n at the representative of every component

    Args:
        g: Graph
        view: Its component partition
        spec: Statistic
        path_cap: Largest component examined for terminal trees

    Returns:
        int64 array indexed by component
    """
    sizes = view.sizes
    if spec.kind == "all":
        return sizes.astype(np.int64)

    if spec.kind == "degree":
        matching = g.degrees() == spec.m
        return np.bincount(view.component_id[matching], minlength=view.count).astype(np.int64)

    # An isolated vertex has nothing at distance m >= 1 and no terminal trees
    values = np.zeros(view.count, dtype=np.int64)
    if spec.kind == "tree":
        pattern = RootedTree.from_canonical(spec.tree)
    for component in np.flatnonzero(sizes > 1).tolist():
        v = int(view.representative[component])
        if spec.kind == "tree":
            values[component] = count_terminal_trees(g, view, v, pattern, path_cap)
        else:
            values[component] = count_statistic(g, view, v, spec, path_cap)
    return values


# =====================================================
# Exhaustive oracle
# =====================================================

def _simple_paths(adjacency: List[List[int]], v: int, x: int, limit: int = 2) -> List[List[int]]:
    """Up to limit simple paths from v to x"""
    found: List[List[int]] = []
    path = [v]
    on_path = {v}

    def extend(current: int) -> None:
        if len(found) >= limit:
            return
        if current == x:
            found.append(list(path))
            return
        for y in adjacency[current]:
            if y not in on_path:
                path.append(y)
                on_path.add(y)
                extend(y)
                on_path.discard(y)
                path.pop()
                if len(found) >= limit:
                    return

    extend(v)
    return found


def _reachable_without(adjacency: List[List[int]], x: int, removed: Optional[int]) -> Set[int]:
    seen = {x}
    queue = deque([x])
    while queue:
        y = queue.popleft()
        for z in adjacency[y]:
            if z != removed and z not in seen:
                seen.add(z)
                queue.append(z)
    return seen


def _isomorphic_at(adjacency: List[List[int]], x: int, vertices: Set[int], tree: RootedTree) -> bool:
    """Try every bijection vertices -> tree sending x to the root"""
    others = sorted(vertices - {x})
    graph_edges = {
        frozenset((a, b)) for a in vertices for b in adjacency[a] if b in vertices
    }
    if len(graph_edges) != tree.m - 1:
        return False
    tree_edges = {frozenset((i, p)) for i, p in enumerate(tree.parents) if p >= 0}
    for image in itertools.permutations(range(1, tree.m)):
        mapping = {x: 0, **dict(zip(others, image))}
        if all(frozenset(mapping[a] for a in edge) in tree_edges for edge in graph_edges):
            return True
    return False


def brute_force_terminal_trees(
    g: MultiGraph,
    v: int,
    tree: RootedTree,
    max_vertices: int = BRUTE_FORCE_MAX_VERTICES,
) -> int:
    """
    Terminal-tree count by enumerating simple paths and bijections

    Args:
        g: Graph
        v: Start vertex
        tree: Rooted tree pattern
        max_vertices: Largest component accepted

    Returns:
        Count
    """
    adjacency = g.adjacency_lists()
    component = _reachable_without(adjacency, v, None)
    if len(component) > max_vertices:
        raise ComponentTooLargeError(len(component), max_vertices)

    count = 0
    for x in sorted(component - {v}):
        paths = _simple_paths(adjacency, v, x)
        if len(paths) != 1:
            continue
        predecessor = paths[0][-2] if len(paths[0]) > 1 else None
        below = _reachable_without(adjacency, x, predecessor)
        if len(below) != tree.m:
            continue
        # Only x may touch the outside, and only through its predecessor
        leaks = any(
            z not in below and not (y == x and z == predecessor)
            for y in below for z in adjacency[y]
        )
        if leaks:
            continue
        if _isomorphic_at(adjacency, x, below, tree):
            count += 1
    return count
