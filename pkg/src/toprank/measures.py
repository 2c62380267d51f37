"""Ranking quality measures, their component decompositions, and the sort oracle.

The unnormalized measures (sumloss, pairwise, dcg, prec@k) score a ranking
against a relevance vector through monotone per-coordinate transforms of
ranks and levels; the normalized variants (ndcg, map, auc) divide by a
relevance-dependent factor and lose that structure, which is what makes
them unlearnable from top-1 feedback.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rankings import Permutation, Relevance, check_same_m

LOSS = "loss"
GAIN = "gain"

KINDS = ("sumloss", "pairwise", "dcg", "prec", "ndcg", "map", "auc")

_POLARITY = {
    "sumloss": LOSS,
    "pairwise": LOSS,
    "auc": LOSS,
    "dcg": GAIN,
    "prec": GAIN,
    "ndcg": GAIN,
    "map": GAIN,
}
_GRADED_OK = frozenset({"dcg", "ndcg"})
_NORMALIZED = frozenset({"ndcg", "map", "auc"})


def _require_binary(rel: Relevance, what: str) -> None:
    if not rel.is_binary:
        raise ValueError(f"{what} is defined for binary relevance only (n=1)")


def sum_loss(sigma: Permutation, rel: Relevance) -> float:
    """Rank-weighted relevance sum: objects are charged their rank if relevant."""
    check_same_m(sigma, rel)
    _require_binary(rel, "sumloss")
    return float(sum(r * lvl for r, lvl in zip(sigma.ranks, rel.levels)))


def pairwise_loss(sigma: Permutation, rel: Relevance) -> int:
    """Number of misordered pairs: an irrelevant object above a relevant one."""
    check_same_m(sigma, rel)
    _require_binary(rel, "pairwise loss")
    count = 0
    for i in range(sigma.m):
        for j in range(sigma.m):
            if sigma.ranks[i] < sigma.ranks[j] and rel.levels[i] < rel.levels[j]:
                count += 1
    return count


def dcg(sigma: Permutation, rel: Relevance) -> float:
    """Discounted cumulative gain with the exponential (2^level - 1) gain."""
    check_same_m(sigma, rel)
    return float(
        sum(
            (2.0**lvl - 1.0) / math.log2(1.0 + rank)
            for rank, lvl in zip(sigma.ranks, rel.levels)
        )
    )


def prec_at_k(sigma: Permutation, rel: Relevance, k: int) -> int:
    """Number of relevant objects ranked at position <= k."""
    check_same_m(sigma, rel)
    _require_binary(rel, "prec@k")
    if not 1 <= k <= sigma.m:
        raise ValueError(f"cutoff k={k} outside 1..{sigma.m}")
    return sum(lvl for rank, lvl in zip(sigma.ranks, rel.levels) if rank <= k)


def ndcg_normalizer(rel: Relevance) -> float:
    """Ideal-ranking dcg; 1.0 for the all-zero vector so ndcg stays defined."""
    gains = sorted(rel.levels, reverse=True)
    if not gains or gains[0] == 0:
        return 1.0
    return float(
        sum((2.0**lvl - 1.0) / math.log2(2.0 + pos) for pos, lvl in enumerate(gains))
    )


def ndcg(sigma: Permutation, rel: Relevance) -> float:
    """dcg scaled into [0, 1] by the ideal ranking; 1.0 for all-zero relevance."""
    check_same_m(sigma, rel)
    if rel.total == 0:
        return 1.0
    return dcg(sigma, rel) / ndcg_normalizer(rel)


def average_precision(sigma: Permutation, rel: Relevance) -> float:
    """Mean of precision-at-rank over the ranks holding relevant objects.

    Returns 1.0 when nothing is relevant, matching the convention used by
    the game-matrix analysis.
    """
    check_same_m(sigma, rel)
    _require_binary(rel, "map")
    if rel.total == 0:
        return 1.0
    hits = 0
    acc = 0.0
    for pos, obj in enumerate(sigma.objects_by_rank, start=1):
        if rel.levels[obj] == 1:
            hits += 1
            acc += hits / pos
    return acc / rel.total


def auc_normalizer(rel: Relevance) -> int:
    """Count of orderable pairs: (#relevant) * (#irrelevant)."""
    _require_binary(rel, "auc")
    s = rel.total
    return s * (rel.m - s)


def auc(sigma: Permutation, rel: Relevance) -> float:
    """Pairwise misorder count scaled by the number of orderable pairs.

    0.0 when no pair is orderable (all-relevant or all-irrelevant vector).
    """
    check_same_m(sigma, rel)
    norm = auc_normalizer(rel)
    if norm == 0:
        return 0.0
    return pairwise_loss(sigma, rel) / norm


def sort_oracle(scores) -> Permutation:
    """Ranking that puts higher scores at better (smaller) ranks.

    This single ordering solves both orientations: it minimizes the
    rank-weighted sum of the scores and maximizes any ranking gain whose
    rank discount decreases with rank. Ties break toward the lower object
    index getting the better rank, which keeps every run reproducible.
    """
    y = np.asarray(scores, dtype=np.float64)
    order = np.argsort(-y, kind="stable")
    ranks = np.empty(y.shape[0], dtype=np.int64)
    ranks[order] = np.arange(1, y.shape[0] + 1)
    return Permutation(tuple(int(r) for r in ranks))


@dataclass(frozen=True)
class MeasureSpec:
    """Identity and component functions of one ranking measure.

    ``k`` is the prec@k cutoff (None elsewhere); ``n`` the maximum relevance
    level the measure is evaluated with (1 = binary).
    """

    kind: str
    k: int | None = None
    n: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == "prec":
            if self.k is None or self.k < 1:
                raise ValueError("prec@k requires a cutoff k >= 1")
        elif self.k is not None:
            raise ValueError(f"{self.kind} takes no cutoff")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.n > 1 and not self.supports_graded:
            raise ValueError(f"{self.kind} supports binary relevance only")

    @property
    def polarity(self) -> str:
        return _POLARITY[self.kind]

    @property
    def is_gain(self) -> bool:
        return self.polarity == GAIN

    @property
    def supports_graded(self) -> bool:
        return self.kind in _GRADED_OK

    @property
    def normalized(self) -> bool:
        """True for the measures with a relevance-dependent normalizer."""
        return self.kind in _NORMALIZED

    @property
    def label(self) -> str:
        if self.kind == "prec":
            return f"prec@{self.k}"
        return self.kind

    def f_scalar(self, rank: int) -> float:
        """Rank component f(rank); monotone over 1..m."""
        if self.kind in ("sumloss", "pairwise"):
            return float(rank)
        if self.kind in ("dcg", "ndcg"):
            return 1.0 / math.log2(1.0 + rank)
        if self.kind == "prec":
            return 1.0 if rank <= self.k else 0.0
        raise ValueError(f"{self.kind} has no per-rank component")

    def g_scalar(self, level: int) -> float:
        """Relevance component g(level); identity except the exponential gain."""
        if self.kind in ("dcg", "ndcg"):
            return 2.0**level - 1.0
        return float(level)

    def f_by_rank(self, m: int) -> np.ndarray:
        """Vector of f over ranks 1..m."""
        if self.kind == "prec" and self.k > m:
            raise ValueError(f"cutoff k={self.k} exceeds m={m}")
        return np.array([self.f_scalar(r) for r in range(1, m + 1)])

    def g_transform(self, levels) -> np.ndarray:
        """Apply g elementwise to an array of relevance levels."""
        arr = np.asarray(levels, dtype=np.float64)
        if self.kind in ("dcg", "ndcg"):
            return np.exp2(arr) - 1.0
        return arr

    def evaluate(self, sigma: Permutation, rel: Relevance) -> float:
        if self.kind == "sumloss":
            return sum_loss(sigma, rel)
        if self.kind == "pairwise":
            return float(pairwise_loss(sigma, rel))
        if self.kind == "dcg":
            return dcg(sigma, rel)
        if self.kind == "prec":
            return float(prec_at_k(sigma, rel, self.k))
        if self.kind == "ndcg":
            return ndcg(sigma, rel)
        if self.kind == "map":
            return average_precision(sigma, rel)
        return auc(sigma, rel)


def get_measure(name: str, *, n: int = 1) -> MeasureSpec:
    """Parse a measure name like ``sumloss``, ``prec@2`` or ``dcg``."""
    name = name.strip().lower()
    if name.startswith("prec@"):
        try:
            k = int(name.split("@", 1)[1])
        except ValueError:
            raise ValueError(f"bad prec@k cutoff in {name!r}") from None
        return MeasureSpec("prec", k=k, n=n)
    if name == "prec":
        raise ValueError("prec requires a cutoff, e.g. prec@2")
    return MeasureSpec(name, n=n)
