"""Exact subset arithmetic over the ground set {0, ..., n-1}.

k-subsets are indexed by their colexicographic rank: the subset
``(c_1 < c_2 < ... < c_k)`` has rank ``sum_m C(c_m, m)``.  All counts are
Python integers, never floats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "ProblemInstance",
    "SubsetIndex",
    "binomial",
    "unrank_subset",
    "rank_subset",
    "disjoint",
    "count_disjoint_pairs",
    "colex_subsets",
    "subset_table",
    "disjointness_mask",
]


def binomial(n: int, k: int) -> int:
    """C(n, k) for nonnegative integers; 0 when k > n."""
    if n < 0 or k < 0:
        raise ValueError(f"binomial needs nonnegative arguments, got ({n}, {k})")
    return comb(n, k)


@dataclass(frozen=True)
class ProblemInstance:
    """Ground set size ``n`` and subset size ``k``.

    ``N`` is the number of k-subsets and ``D`` the number of ordered pairs
    of disjoint k-subsets.
    """

    n: int
    k: int
    N: int = field(init=False)
    D: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not isinstance(self.k, (int, np.integer)):
            raise TypeError("n and k must be integers")
        if self.n < 1 or self.k < 1:
            raise ValueError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "N", comb(self.n, self.k))
        object.__setattr__(self, "D", comb(self.n, self.k) * comb(self.n - self.k, self.k))

    @property
    def degenerate(self) -> bool:
        """True when 2k > n, i.e. no two k-subsets are disjoint."""
        return 2 * self.k > self.n

    def subsets(self) -> Iterator[tuple[int, ...]]:
        return colex_subsets(self.n, self.k)


@dataclass(frozen=True)
class SubsetIndex:
    rank: int
    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.rank < comb(self.n, self.k):
            raise ValueError(f"rank {self.rank} out of range for C({self.n},{self.k})")

    @classmethod
    def from_elements(cls, elements: Sequence[int], n: int) -> "SubsetIndex":
        return cls(rank_subset(elements, n), n, len(elements))

    @property
    def elements(self) -> tuple[int, ...]:
        return unrank_subset(self.rank, self.n, self.k)


def unrank_subset(r: int, n: int, k: int) -> tuple[int, ...]:
    """Return the ``r``-th k-subset of {0..n-1} in colex order."""
    if not 0 <= r < comb(n, k):
        raise ValueError(f"rank {r} out of range [0, C({n},{k}))")
    out = []
    c = n
    for m in range(k, 0, -1):
        # largest c with C(c, m) <= r
        c -= 1
        while comb(c, m) > r:
            c -= 1
        out.append(c)
        r -= comb(c, m)
    return tuple(reversed(out))


def rank_subset(S: Sequence[int], n: int) -> int:
    """Colex rank of the strictly increasing tuple ``S`` over {0..n-1}."""
    S = tuple(int(s) for s in S)
    if any(a >= b for a, b in zip(S, S[1:])):
        raise ValueError(f"subset must be strictly increasing: {S}")
    if S and (S[0] < 0 or S[-1] >= n):
        raise ValueError(f"subset elements must lie in [0, {n}): {S}")
    return sum(comb(c, m) for m, c in enumerate(S, start=1))


def disjoint(S: SubsetIndex, T: SubsetIndex) -> bool:
    if (S.n, S.k) != (T.n, T.k):
        raise ValueError("subsets belong to different instances")
    return not set(S.elements) & set(T.elements)


def count_disjoint_pairs(inst: ProblemInstance) -> int:
    return inst.D


def colex_subsets(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-subsets of {0..n-1} in colex order."""
    # colex order on S is lex order on the reversed tuples
    yield from sorted(combinations(range(n), k), key=lambda s: s[::-1])


@lru_cache(maxsize=64)
def _subset_table(n: int, k: int) -> np.ndarray:
    table = np.array(list(colex_subsets(n, k)), dtype=np.int64).reshape(-1, k)
    table.setflags(write=False)
    return table


def subset_table(inst: ProblemInstance) -> np.ndarray:
    """``(N, k)`` array whose row r is ``unrank_subset(r, n, k)``."""
    return _subset_table(inst.n, inst.k)


@lru_cache(maxsize=64)
def _disjointness_mask(n: int, k: int) -> np.ndarray:
    table = _subset_table(n, k)
    bits = np.zeros((len(table), n), dtype=bool)
    np.put_along_axis(bits, table, True, axis=1)
    mask = ~(bits.astype(np.int64) @ bits.T.astype(np.int64)).astype(bool)
    mask.setflags(write=False)
    return mask


def disjointness_mask(inst: ProblemInstance) -> np.ndarray:
    """Boolean ``(N, N)`` array, True where the two subsets are disjoint."""
    return _disjointness_mask(inst.n, inst.k)
