"""
Rooted Trees - Parsing, AHU canonical forms and automorphism counts
"""

import math
from collections import Counter
from typing import Callable, Dict, Iterable, List, Tuple

from ..utils.validators import parse_parent_array, validate_canonical_string, validate_parent_array
from .exceptions import ParameterError


class RootedTree:
    """Rooted tree on vertices 0..m-1 with root 0 (label 1 in parent-array text)"""

    def __init__(self, parents: List[int]):
        """
        Initialize from 0-based parents; parents[0] must be -1

        Args:
            parents: Parent of each vertex, -1 for the root
        """
        if not parents or parents[0] != -1:
            raise ParameterError("Vertex 0 must be the root")
        self._parents = tuple(parents)
        children: List[List[int]] = [[] for _ in parents]
        for vertex, parent in enumerate(parents[1:], start=1):
            if not 0 <= parent < len(parents) or parent == vertex:
                raise ParameterError(f"Vertex {vertex + 1} has invalid parent {parent + 1}")
            children[parent].append(vertex)
        self._children = tuple(tuple(c) for c in children)
        self._code, self._automorphisms = _encode(0, lambda x: self._children[x])
        if self._code.count("(") != len(parents):
            raise ParameterError("Parent links contain a cycle that avoids the root")

    # --------------------------------------------------
    # Constructors
    # --------------------------------------------------

    @classmethod
    def from_parent_array(cls, text: str) -> "RootedTree":
        """Parse "0 1 1 2": entry i is the 1-based parent of vertex i, 0 marks the root"""
        error = validate_parent_array(text)
        if error:
            raise ParameterError(error)
        return cls([p - 1 for p in parse_parent_array(text)])

    @classmethod
    def from_canonical(cls, text: str) -> "RootedTree":
        """Rebuild a tree from its AHU string; vertices are numbered in preorder"""
        error = validate_canonical_string(text)
        if error:
            raise ParameterError(error)
        parents: List[int] = []
        stack: List[int] = []
        for char in text:
            if char == "(":
                parents.append(stack[-1] if stack else -1)
                stack.append(len(parents) - 1)
            else:
                stack.pop()
        return cls(parents)

    @classmethod
    def parse(cls, text: str) -> "RootedTree":
        """Accept either a parent array or an AHU string"""
        text = text.strip()
        if text.startswith("("):
            return cls.from_canonical(text)
        return cls.from_parent_array(text)

    # --------------------------------------------------
    # Properties
    # --------------------------------------------------

    @property
    def m(self) -> int:
        return len(self._parents)

    @property
    def parents(self) -> Tuple[int, ...]:
        return self._parents

    @property
    def children(self) -> Tuple[Tuple[int, ...], ...]:
        return self._children

    @property
    def degrees(self) -> List[int]:
        """deg_T: children count at the root, children + 1 elsewhere"""
        return [len(self._children[0])] + [len(c) + 1 for c in self._children[1:]]

    @property
    def canonical(self) -> str:
        return self._code

    @property
    def automorphisms(self) -> int:
        return self._automorphisms

    def to_parent_array(self) -> str:
        return " ".join(str(p + 1) for p in self._parents)

    def __eq__(self, other) -> bool:
        """Root-preserving isomorphism"""
        if not isinstance(other, RootedTree):
            return NotImplemented
        return self._code == other._code

    def __hash__(self) -> int:
        return hash(self._code)

    def __repr__(self) -> str:
        return f"RootedTree({self._code})"


def _encode(root: int, children: Callable[[int], Iterable[int]]) -> Tuple[str, int]:
    """AHU string and automorphism group order of the tree hanging below root"""
    order = [root]
    kids: Dict[int, List[int]] = {}
    position = 0
    while position < len(order):
        x = order[position]
        kids[x] = list(children(x))
        order.extend(kids[x])
        position += 1

    codes: Dict[int, str] = {}
    automorphisms: Dict[int, int] = {}
    for x in reversed(order):
        child_codes = sorted(codes[y] for y in kids[x])
        count = 1
        for y in kids[x]:
            count *= automorphisms[y]
        for k in Counter(child_codes).values():
            count *= math.factorial(k)
        codes[x] = "(" + "".join(child_codes) + ")"
        automorphisms[x] = count
    return codes[root], automorphisms[root]


def ahu_code(root: int, children: Callable[[int], Iterable[int]]) -> str:
    """
    AHU canonical string of any rooted tree given by a children function

    Args:
        root: Root vertex
        children: Maps a vertex to its children

    Returns:
        Canonical string; equal strings iff root-preserving isomorphic
    """
    return _encode(root, children)[0]


def canonical_form(t: RootedTree) -> str:
    """leaf -> "()", internal node -> "(" + sorted child strings + ")" """
    return t.canonical


def automorphism_count(t: RootedTree) -> int:
    """c(T): product over vertices of k! for every group of k identical child subtrees"""
    return t.automorphisms


def all_rooted_trees(m: int) -> List[RootedTree]:
    """
    Every rooted tree with m vertices up to root-preserving isomorphism

    Args:
        m: Vertex count, 1 <= m

    Returns:
        Trees sorted by canonical string
    """
    if m < 1:
        raise ParameterError(f"Tree size must be >= 1, got {m}")
    layer = {"()": RootedTree([-1])}
    for _ in range(m - 1):
        grown: Dict[str, RootedTree] = {}
        for tree in layer.values():
            for attach in range(tree.m):
                bigger = RootedTree(list(tree.parents) + [attach])
                grown.setdefault(bigger.canonical, bigger)
        layer = grown
    return [layer[code] for code in sorted(layer)]
