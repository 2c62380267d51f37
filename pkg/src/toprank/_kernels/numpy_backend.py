"""Pure-numpy episode kernel: vectorized across rounds.

Matches the numba backend round for round: both resolve ranking ties with a
stable descending sort, so for identical inputs the chosen rankings are
bit-identical and the per-round values differ at most by float summation
order (exactly zero for integer-valued measures).
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def exploration_orders(probes: np.ndarray, m: int) -> np.ndarray:
    """Objects-by-rank rows for probe rounds: probed object first, rest ascending."""
    n = probes.shape[0]
    out = np.empty((n, m), dtype=np.int64)
    out[:, 0] = probes
    cols = np.broadcast_to(np.arange(m, dtype=np.int64), (n, m))
    keep = cols != probes[:, None]
    out[:, 1:] = cols[keep].reshape(n, m - 1)
    return out


def episode_values(
    shat_blocks: np.ndarray,
    block_of_t: np.ndarray,
    expl_obj: np.ndarray,
    pert: np.ndarray,
    g_values: np.ndarray,
    f_by_rank: np.ndarray,
    pairwise: bool,
) -> np.ndarray:
    """Per-round measure values of the perturbed-score learner.

    shat_blocks : (K, m) score state in force during each block
    block_of_t  : (T,) block index per round
    expl_obj    : (T,) probed object per round, -1 on exploitation rounds
    pert        : (T, m) perturbations (ignored on exploration rounds)
    g_values    : (T, m) g-transformed relevance used to score the chosen ranking
    f_by_rank   : (m,) rank weights for the value; unused when ``pairwise``
    """
    T, m = pert.shape
    scores = shat_blocks[block_of_t] + pert
    order = np.argsort(-scores, axis=1, kind="stable")
    probe_rounds = expl_obj >= 0
    if probe_rounds.any():
        order[probe_rounds] = exploration_orders(expl_obj[probe_rounds], m)
    by_rank = np.take_along_axis(g_values, order, axis=1)
    if pairwise:
        is_zero = by_rank == 0
        zeros_before = np.cumsum(is_zero, axis=1) - is_zero
        return ((by_rank > 0) * zeros_before).sum(axis=1).astype(np.float64)
    return by_rank @ f_by_rank
