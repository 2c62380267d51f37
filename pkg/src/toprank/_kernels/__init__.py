"""Hot per-round loops, with a numba fast path and a pure-numpy fallback.

The backend is chosen by the ``TOPRANK_KERNELS`` environment variable
("numba" or "numpy"). When unset, numba is used if it imports, otherwise
the numpy path. ``benchmarks/bench_kernels.py`` compares the two.
"""
from __future__ import annotations

import os

from . import numpy_backend

try:
    from . import numba_backend
except ImportError:  # pragma: no cover - exercised only without numba
    numba_backend = None

_BACKENDS = {"numpy": numpy_backend}
if numba_backend is not None:
    _BACKENDS["numba"] = numba_backend


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        ) from None


def active_backend():
    """Backend selected by TOPRANK_KERNELS, defaulting to numba when present."""
    name = os.environ.get("TOPRANK_KERNELS", "").strip().lower()
    if name:
        return get_backend(name)
    return _BACKENDS.get("numba", numpy_backend)


def episode_values(shat_blocks, block_of_t, expl_obj, pert, g_values, f_by_rank, pairwise):
    return active_backend().episode_values(
        shat_blocks, block_of_t, expl_obj, pert, g_values, f_by_rank, pairwise
    )
