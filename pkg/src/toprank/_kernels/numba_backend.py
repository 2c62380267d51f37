"""Numba episode kernel: one fused jit loop over rounds.

Same contract as the numpy backend; the stable mergesort keeps tie-breaking
identical, so both backends choose the same ranking every round.
"""
from __future__ import annotations

import numpy as np
from numba import njit

BACKEND = "numba"


@njit(cache=True)
def _episode_values(shat_blocks, block_of_t, expl_obj, pert, g_values, f_by_rank, pairwise):
    T, m = pert.shape
    values = np.empty(T, dtype=np.float64)
    neg = np.empty(m, dtype=np.float64)
    for t in range(T):
        probe = expl_obj[t]
        if probe >= 0:
            order = np.empty(m, dtype=np.int64)
            order[0] = probe
            pos = 1
            for o in range(m):
                if o != probe:
                    order[pos] = o
                    pos += 1
        else:
            b = block_of_t[t]
            for o in range(m):
                neg[o] = -(shat_blocks[b, o] + pert[t, o])
            order = np.argsort(neg, kind="mergesort")
        if pairwise:
            zeros = 0
            count = 0.0
            for p in range(m):
                lvl = g_values[t, order[p]]
                if lvl > 0.0:
                    count += zeros
                else:
                    zeros += 1
            values[t] = count
        else:
            acc = 0.0
            for p in range(m):
                acc += f_by_rank[p] * g_values[t, order[p]]
            values[t] = acc
    return values


def episode_values(shat_blocks, block_of_t, expl_obj, pert, g_values, f_by_rank, pairwise):
    return _episode_values(
        np.ascontiguousarray(shat_blocks, dtype=np.float64),
        np.ascontiguousarray(block_of_t, dtype=np.int64),
        np.ascontiguousarray(expl_obj, dtype=np.int64),
        np.ascontiguousarray(pert, dtype=np.float64),
        np.ascontiguousarray(g_values, dtype=np.float64),
        np.ascontiguousarray(f_by_rank, dtype=np.float64),
        bool(pairwise),
    )


def warmup() -> None:
    """Trigger jit compilation on a tiny workload."""
    episode_values(
        np.zeros((1, 2)),
        np.zeros(2, dtype=np.int64),
        np.array([0, -1], dtype=np.int64),
        np.zeros((2, 2)),
        np.ones((2, 2)),
        np.array([2.0, 1.0]),
        False,
    )
