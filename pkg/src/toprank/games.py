"""Explicit loss, feedback and signal matrices for the top-1 feedback game.

Both players' finite action sets are materialized densely: all m! rankings
(rows) against all 2^m binary relevance vectors (columns). Row order is
lexicographic in the rank vector; column order is an m-bit counter with
object 0 as the most significant bit. Dense storage caps m at 8.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .measures import MeasureSpec, ndcg_normalizer
from .rankings import Permutation, Relevance

MAX_M_DENSE = 8
MAX_M_OUTCOMES = 20


def enumerate_permutations(m: int) -> np.ndarray:
    """All m! rank vectors, lexicographically ordered; shape (m!, m)."""
    if not 1 <= m <= MAX_M_DENSE:
        raise ValueError(f"m={m} outside 1..{MAX_M_DENSE} (m! blowup guard)")
    return np.array(list(permutations(range(1, m + 1))), dtype=np.int64)


def enumerate_relevance(m: int) -> np.ndarray:
    """All 2^m binary vectors as an m-bit counter, object 0 first; shape (2^m, m)."""
    if not 1 <= m <= MAX_M_OUTCOMES:
        raise ValueError(f"m={m} outside 1..{MAX_M_OUTCOMES}")
    idx = np.arange(2**m, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


@dataclass(frozen=True)
class GameMatrices:
    """Dense value matrix L and feedback matrix H for one measure at size m."""

    measure: MeasureSpec
    m: int
    ranks: np.ndarray  # (m!, m) rank of each object per action
    outcomes: np.ndarray  # (2^m, m) binary relevance vectors
    L: np.ndarray  # (m!, 2^m) measure values
    H: np.ndarray  # (m!, 2^m) relevance of the top-ranked object

    @property
    def n_actions(self) -> int:
        return self.ranks.shape[0]

    @property
    def n_outcomes(self) -> int:
        return self.outcomes.shape[0]

    @property
    def polarity(self) -> str:
        return self.measure.polarity

    @property
    def tops(self) -> np.ndarray:
        """Object ranked first under each action."""
        return np.argmin(self.ranks, axis=1)

    def action(self, i: int) -> Permutation:
        return Permutation(tuple(int(r) for r in self.ranks[i]))

    def outcome(self, j: int) -> Relevance:
        return Relevance(tuple(int(v) for v in self.outcomes[j]), n=1)


@dataclass(frozen=True)
class SignalMatrix:
    """2 x 2^m indicator of which feedback symbol each outcome produces."""

    action: int
    entries: np.ndarray

    @property
    def columns(self) -> np.ndarray:
        """Columns of the transpose, i.e. the two indicator vectors over outcomes."""
        return self.entries.T.astype(np.float64)


def _pairwise_counts(ranks: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Misordered-pair counts for every action against one relevance vector."""
    lo = np.flatnonzero(levels == 0)
    hi = np.flatnonzero(levels == 1)
    if lo.size == 0 or hi.size == 0:
        return np.zeros(ranks.shape[0])
    counts = np.zeros(ranks.shape[0], dtype=np.int64)
    for a in lo:
        for b in hi:
            counts += ranks[:, a] < ranks[:, b]
    return counts.astype(np.float64)


def _map_values(ranks: np.ndarray, levels: np.ndarray) -> np.ndarray:
    rel = np.flatnonzero(levels == 1)
    if rel.size == 0:
        return np.ones(ranks.shape[0])
    rel_ranks = np.sort(ranks[:, rel], axis=1).astype(np.float64)
    hits = np.arange(1, rel.size + 1, dtype=np.float64)
    return (hits / rel_ranks).mean(axis=1)


def build_game(measure: MeasureSpec, m: int) -> GameMatrices:
    """Populate L and H for the given measure at size m (binary relevance only)."""
    if measure.n != 1:
        raise ValueError("game matrices are built for binary relevance only")
    ranks = enumerate_permutations(m)
    outcomes = enumerate_relevance(m)
    tops = np.argmin(ranks, axis=1)
    H = outcomes[:, tops].T.copy()

    kind = measure.kind
    if kind in ("sumloss", "dcg", "prec"):
        fvals = measure.f_by_rank(m)
        L = fvals[ranks - 1] @ outcomes.T.astype(np.float64)
    elif kind == "ndcg":
        fvals = measure.f_by_rank(m)
        raw = fvals[ranks - 1] @ outcomes.T.astype(np.float64)
        L = np.empty_like(raw)
        for j in range(outcomes.shape[0]):
            rel = Relevance(tuple(int(v) for v in outcomes[j]), n=1)
            if rel.total == 0:
                L[:, j] = 1.0
            else:
                L[:, j] = raw[:, j] / ndcg_normalizer(rel)
    elif kind == "map":
        L = np.empty((ranks.shape[0], outcomes.shape[0]))
        for j in range(outcomes.shape[0]):
            L[:, j] = _map_values(ranks, outcomes[j])
    elif kind in ("pairwise", "auc"):
        L = np.empty((ranks.shape[0], outcomes.shape[0]))
        for j in range(outcomes.shape[0]):
            counts = _pairwise_counts(ranks, outcomes[j])
            if kind == "auc":
                s = int(outcomes[j].sum())
                norm = s * (m - s)
                L[:, j] = counts / norm if norm > 0 else 0.0
            else:
                L[:, j] = counts
    else:
        raise ValueError(f"cannot build matrices for {kind}")

    return GameMatrices(measure=measure, m=m, ranks=ranks, outcomes=outcomes, L=L, H=H)


def signal_matrix(game: GameMatrices, i: int) -> SignalMatrix:
    """Indicator matrix of the feedback symbol under action i: row 1 marks
    outcomes yielding feedback 0, row 2 those yielding feedback 1."""
    if not 0 <= i < game.n_actions:
        raise IndexError(f"action index {i} outside 0..{game.n_actions - 1}")
    h = game.H[i].astype(np.int8)
    return SignalMatrix(action=i, entries=np.stack([1 - h, h]))


def signal_columns(game: GameMatrices, actions=None) -> np.ndarray:
    """Stacked transposed-signal-matrix columns for a set of actions.

    Shape (2^m, 2 * #actions); duplicates across actions sharing a top
    object are kept since they do not change the span.
    """
    if actions is None:
        actions = range(game.n_actions)
    cols = []
    for i in actions:
        cols.append(signal_matrix(game, i).columns)
    return np.hstack(cols) if cols else np.empty((game.n_outcomes, 0))


def outcome_labels(game: GameMatrices) -> list[str]:
    return ["".join(str(int(v)) for v in row) for row in game.outcomes]


def write_matrix_csv(game: GameMatrices, path, which: str = "L") -> None:
    """Dump L or H row-major with a header row of outcome bitstrings."""
    if which == "L":
        matrix = game.L
    elif which == "H":
        matrix = game.H
    else:
        raise ValueError("which must be 'L' or 'H'")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["action"] + outcome_labels(game))
        for i in range(game.n_actions):
            label = "".join(str(int(r)) for r in game.ranks[i])
            writer.writerow([label] + [repr(float(v)) for v in matrix[i]])


def write_signal_csv(game: GameMatrices, i: int, path) -> None:
    sig = signal_matrix(game, i)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feedback"] + outcome_labels(game))
        for symbol, row in enumerate(sig.entries):
            writer.writerow([symbol] + [int(v) for v in row])
