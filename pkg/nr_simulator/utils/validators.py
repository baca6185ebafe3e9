"""
Validators - Check user-supplied text and paths before they reach the simulator

Every validator returns an error message when the input is invalid and None
when it is valid; callers decide which exception to raise.
"""

import os
import re
from typing import List, Optional

# Parent-array text: whitespace separated non-negative integers
PARENT_ARRAY_PATTERN = re.compile(r"^\s*\d+(\s+\d+)*\s*$")

# Largest rooted tree pattern accepted on the command line
MAX_TREE_VERTICES = 64


def parse_parent_array(text: str) -> List[int]:
    """
    Split parent-array text into integers

    Args:
        text: e.g. "0 1 1 2"

    Returns:
        List of integers (1-based parent labels, 0 marks the root)
    """
    return [int(token) for token in text.split()]


def validate_parent_array(text: str) -> Optional[str]:
    """
    Validate a parent array "0 1 1 2" (entry i is the parent of vertex i)

    Args:
        text: Parent-array text

    Returns:
        Error message if invalid, None if valid
    """
    if not text or not text.strip():
        return "Parent array cannot be empty"

    if not PARENT_ARRAY_PATTERN.match(text):
        return f"Parent array must be whitespace separated non-negative integers, got '{text}'"

    parents = parse_parent_array(text)
    m = len(parents)

    if m > MAX_TREE_VERTICES:
        return f"Tree has {m} vertices, at most {MAX_TREE_VERTICES} allowed"

    if parents[0] != 0:
        return "Vertex 1 must be the root (first entry must be 0)"

    for vertex, parent in enumerate(parents[1:], start=2):
        if parent == 0:
            return f"Vertex {vertex} marked as root; only vertex 1 may be the root"
        if parent > m:
            return f"Vertex {vertex} has parent {parent} outside 1..{m}"
        if parent == vertex:
            return f"Vertex {vertex} is its own parent"

    # Every vertex must reach the root without revisiting a vertex
    for start in range(2, m + 1):
        seen = set()
        current = start
        while current != 1:
            if current in seen:
                return f"Parent array contains a cycle through vertex {current}"
            seen.add(current)
            current = parents[current - 1]

    return None


def validate_canonical_string(text: str) -> Optional[str]:
    """
    Validate a canonical (AHU) tree string such as "(()())"

    Args:
        text: Parenthesis string

    Returns:
        Error message if invalid, None if valid
    """
    if not text:
        return "Canonical string cannot be empty"

    if set(text) - {"(", ")"}:
        return f"Canonical string may only contain parentheses, got '{text}'"

    if len(text) // 2 > MAX_TREE_VERTICES:
        return f"Tree has more than {MAX_TREE_VERTICES} vertices"

    depth = 0
    for position, char in enumerate(text):
        depth += 1 if char == "(" else -1
        if depth < 0:
            return "Unbalanced parentheses in canonical string"
        if depth == 0 and position != len(text) - 1:
            return "Canonical string must describe a single rooted tree"

    if depth != 0:
        return "Unbalanced parentheses in canonical string"

    return None


def validate_output_path(path: str) -> Optional[str]:
    """
    Check that a file can be written at path (its directory may not exist yet)

    Args:
        path: Output file path

    Returns:
        Error message if not writable, None otherwise
    """
    if not path or not str(path).strip():
        return "Output path cannot be empty"

    if os.path.isdir(path):
        return f"Output path {path} is a directory"

    directory = os.path.dirname(os.path.abspath(path))
    # Walk up to the first existing ancestor
    while not os.path.exists(directory):
        parent = os.path.dirname(directory)
        if parent == directory:
            break
        directory = parent

    if not os.path.isdir(directory):
        return f"Output path {path}: {directory} is not a directory"

    if not os.access(directory, os.W_OK):
        return f"Output path {path}: directory {directory} is not writable"

    if os.path.exists(path) and not os.access(path, os.W_OK):
        return f"Output path {path} is not writable"

    return None
