"""
Sampling helpers - Vose alias tables and a buffered uniform stream
"""

from typing import List

import numpy as np

from .exceptions import ParameterError


class AliasTable:
    """O(1) sampling from a discrete distribution proportional to given weights (Vose)"""

    def __init__(self, weights: np.ndarray):
        """
        Build the alias table

        Args:
            weights: Non-negative weights, not all zero
        """
        weights = np.asarray(weights, dtype=np.float64)
        size = weights.size
        if size == 0:
            raise ParameterError("Alias table needs at least one weight")
        if np.any(weights < 0):
            raise ParameterError("Alias table weights must be non-negative")
        total = weights.sum()
        if total <= 0:
            raise ParameterError("Alias table weights sum to zero")

        scaled = (weights * size / total).tolist()
        prob = [0.0] * size
        alias = list(range(size))

        small: List[int] = [i for i, w in enumerate(scaled) if w < 1.0]
        large: List[int] = [i for i, w in enumerate(scaled) if w >= 1.0]

        while small and large:
            less = small.pop()
            more = large.pop()

            prob[less] = scaled[less]
            alias[less] = more

            scaled[more] -= 1.0 - scaled[less]
            if scaled[more] < 1.0:
                small.append(more)
            else:
                large.append(more)

        # Leftovers are 1 up to rounding
        for index in large + small:
            prob[index] = 1.0
            alias[index] = index

        self._prob = np.array(prob)
        self._alias = np.array(alias, dtype=np.int64)

    def __len__(self) -> int:
        return int(self._prob.size)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """
        Draw size indices

        Args:
            size: Number of draws
            rng: Random stream

        Returns:
            int64 array of indices
        """
        columns = rng.integers(0, len(self), size=size)
        keep = rng.random(size) < self._prob[columns]
        return np.where(keep, columns, self._alias[columns])

    def probabilities(self) -> np.ndarray:
        """Distribution encoded by the table (for checks)"""
        size = len(self)
        result = self._prob / size
        np.add.at(result, self._alias, (1.0 - self._prob) / size)
        return result


class UniformStream:
    """Uniform variates in (0, 1] served one at a time from numpy blocks"""

    def __init__(self, rng: np.random.Generator, block_size: int = 8192):
        self._rng = rng
        self._block_size = block_size
        self._buffer: List[float] = []
        self._position = 0

    def next(self) -> float:
        if self._position == len(self._buffer):
            self._buffer = (1.0 - self._rng.random(self._block_size)).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value
