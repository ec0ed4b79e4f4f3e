"""Index maps tying output components to example subsets.

An index map assigns to each of T outputs a subset of the N examples.
Multi-category learning gives every output the full sample, multi-task
learning partitions the sample into per-task blocks, and 1-vs-1 voting
assigns each unordered class pair the examples of its two classes.
Subsets hold 0-based positions into the sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import math

import numpy as np


@dataclass(frozen=True)
class IndexMap:
    T: int
    N: int
    subsets: tuple
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.T < 1 or self.N < 1:
            raise ValueError("T and N must be positive")
        if len(self.subsets) != self.T:
            raise ValueError("need one subset per output")
        norm = []
        for t, s in enumerate(self.subsets):
            idx = tuple(sorted(set(int(i) for i in s)))
            if not idx:
                raise ValueError(f"subset {t} is empty")
            if idx[0] < 0 or idx[-1] >= self.N:
                raise ValueError(f"subset {t} has an index outside 0..{self.N - 1}")
            norm.append(idx)
        object.__setattr__(self, "subsets", tuple(norm))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(int(c) for c in self.labels))

    @property
    def support_size(self) -> int:
        return sum(len(s) for s in self.subsets)

    def multiplicities(self) -> np.ndarray:
        """How many outputs each example index feeds into."""
        counts = np.zeros(self.N, dtype=np.int64)
        for s in self.subsets:
            counts[list(s)] += 1
        return counts

    def support_mask(self) -> np.ndarray:
        mask = np.zeros((self.T, self.N), dtype=bool)
        for t, s in enumerate(self.subsets):
            mask[t, list(s)] = True
        return mask

    def is_multicategory(self) -> bool:
        full = tuple(range(self.N))
        return all(s == full for s in self.subsets)

    def is_multitask_partition(self) -> bool:
        seen = set()
        for s in self.subsets:
            if seen & set(s):
                return False
            seen |= set(s)
        return len(seen) == self.N


def multicategory_map(T: int, N: int) -> IndexMap:
    """Every output sees the whole sample (one-vs-all coding)."""
    if T < 1 or N < 1:
        raise ValueError("T and N must be positive")
    full = tuple(range(N))
    return IndexMap(T=T, N=N, subsets=tuple(full for _ in range(T)))


def multitask_map(T: int, n: int) -> IndexMap:
    """Contiguous blocks of n examples per task; N = n*T."""
    if T < 1 or n < 1:
        raise ValueError("T and n must be positive")
    subsets = tuple(tuple(range(t * n, (t + 1) * n)) for t in range(T))
    return IndexMap(T=T, N=n * T, subsets=subsets)


def one_vs_one_map(labels: Sequence[int]) -> IndexMap:
    """One output per unordered class pair, fed by that pair's examples.

    Labels are integers 1..C; every class must appear at least once and
    every example then lands in exactly C-1 subsets.
    """
    labs = [int(c) for c in labels]
    if not labs:
        raise ValueError("labels must be nonempty")
    C = max(labs)
    if C < 2:
        raise ValueError("need at least two classes")
    by_class = {c: [i for i, y in enumerate(labs) if y == c] for c in range(1, C + 1)}
    for c, members in by_class.items():
        if not members:
            raise ValueError(f"class {c} has no examples")
    subsets = []
    for c1 in range(1, C + 1):
        for c2 in range(c1 + 1, C + 1):
            subsets.append(tuple(sorted(by_class[c1] + by_class[c2])))
    return IndexMap(T=C * (C - 1) // 2, N=len(labs), subsets=tuple(subsets), labels=tuple(labs))


def overlap_factor(index_map: IndexMap) -> float:
    """Smallest theta with sum_t sum_{i in I_t} a_i <= theta^2 sum_i a_i.

    Equals the square root of the maximum multiplicity; the defining
    inequality is tight at the indicator of a busiest example.
    """
    return math.sqrt(float(index_map.multiplicities().max()))
