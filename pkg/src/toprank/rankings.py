"""Core value types: rankings of a fixed object set and relevance vectors.

Objects are indexed 0..m-1 throughout the code base. Ranks are 1-based
(rank 1 is the top slot), so the usual log2(1 + rank) discounts and
rank-weighted sums keep their textbook form.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np


class DimensionMismatch(ValueError):
    """A ranking and a relevance vector disagree on the number of objects."""


@dataclass(frozen=True)
class Permutation:
    """A ranking of m objects; ``ranks[i]`` is the 1-based rank of object i."""

    ranks: tuple[int, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        m = len(ranks)
        if sorted(ranks) != list(range(1, m + 1)):
            raise ValueError(f"ranks must be a bijection on 1..{m}, got {ranks}")

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def from_objects_by_rank(cls, order: Iterable[int]) -> "Permutation":
        """Build from the inverse view: ``order[p]`` is the object at rank p+1."""
        order = list(order)
        ranks = [0] * len(order)
        for pos, obj in enumerate(order):
            ranks[obj] = pos + 1
        return cls(tuple(ranks))

    @property
    def m(self) -> int:
        return len(self.ranks)

    @cached_property
    def objects_by_rank(self) -> tuple[int, ...]:
        """Inverse view: element p is the object occupying rank p+1."""
        inv = [0] * self.m
        for obj, rank in enumerate(self.ranks):
            inv[rank - 1] = obj
        return tuple(inv)

    @property
    def top(self) -> int:
        """Object placed at rank 1."""
        return self.objects_by_rank[0]

    def object_at(self, rank: int) -> int:
        """Object occupying the given 1-based rank."""
        return self.objects_by_rank[rank - 1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.ranks, dtype=np.int64)


@dataclass(frozen=True)
class Relevance:
    """Per-object relevance levels in {0..n}; n=1 means binary relevance."""

    levels: tuple[int, ...]
    n: int = 1

    def __post_init__(self):
        levels = tuple(int(v) for v in self.levels)
        object.__setattr__(self, "levels", levels)
        if self.n < 1:
            raise ValueError(f"max relevance level n must be >= 1, got {self.n}")
        for v in levels:
            if not 0 <= v <= self.n:
                raise ValueError(f"relevance level {v} outside 0..{self.n}")

    @property
    def m(self) -> int:
        return len(self.levels)

    @property
    def is_binary(self) -> bool:
        return self.n == 1

    @property
    def total(self) -> int:
        return sum(self.levels)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.int64)


def check_same_m(sigma: Permutation, rel: Relevance) -> None:
    if sigma.m != rel.m:
        raise DimensionMismatch(
            f"ranking over {sigma.m} objects vs relevance over {rel.m}"
        )
