"""Follow-the-perturbed-leader core and the full-information baseline.

One code path serves losses and gains alike: the learner state holds
accumulated (g-transformed) relevance, a uniform perturbation is added,
and the sort oracle ranks higher perturbed scores better. For the
rank-weighted loss that ordering minimizes the rank/score inner product;
for the discounted and cutoff gains it maximizes the gain, because their
rank discounts decrease with rank.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .measures import MeasureSpec, sort_oracle
from .rankings import Permutation
from .traces import RegretTrace, build_trace


class RefusedMeasure(ValueError):
    """Raised when asked to learn a measure that provably cannot be learned."""


def _refuse_normalized(measure: MeasureSpec) -> None:
    if measure.normalized:
        raise RefusedMeasure(
            f"{measure.label}: no online algorithm has sublinear regret for "
            "normalized ranking measures (ndcg, map, auc) under top-1 feedback; "
            "their relevance-dependent normalizer defeats unbiased estimation "
            "of the unobserved relevance vector"
        )


def _check_stream_levels(stream: np.ndarray, measure: MeasureSpec) -> None:
    if stream.size and (stream.min() < 0 or stream.max() > measure.n):
        raise ValueError(f"stream levels outside 0..{measure.n} for {measure.label}")


@dataclass(frozen=True)
class FtplParams:
    """Perturbation scale and the norm bounds it is derived from.

    ``D`` bounds the l1 norm of the learner's score vectors, ``R`` the
    learner/adversary inner product, ``A`` the l1 norm of the adversary's
    (g-transformed) vectors. Perturbations are uniform on [0, 1/epsilon].
    """

    epsilon: float
    D: float
    R: float
    A: float

    def __post_init__(self):
        if not (self.epsilon > 0 and self.D > 0 and self.R > 0 and self.A > 0):
            raise ValueError("epsilon, D, R, A must all be positive")

    @property
    def scale(self) -> float:
        """Upper end of the uniform perturbation range."""
        return 1.0 / self.epsilon


def params_for(measure: MeasureSpec, m: int, n: int, K: int) -> FtplParams:
    """Per-measure norm bounds and the perturbation parameter for K updates.

    pairwise uses the rank-weighted-sum learner verbatim, so it shares its
    parameters. epsilon = sqrt(D / (R * A * K)) throughout, which reduces to
    sqrt(1 / (m K)) for the rank-weighted sum and the cutoff gain, and picks
    up a 1/(2^n - 1) factor for the discounted gain at n relevance levels.
    """
    _refuse_normalized(measure)
    if K < 1:
        raise ValueError("K must be >= 1")
    kind = measure.kind
    if kind in ("sumloss", "pairwise"):
        D = R = m * (m + 1) / 2.0
        A = float(m)
    elif kind == "dcg":
        D = sum(1.0 / math.log2(1.0 + i) for i in range(1, m + 1))
        gmax = 2.0**n - 1.0
        R = gmax * D
        A = gmax * m
    elif kind == "prec":
        if measure.k > m:
            raise ValueError(f"cutoff k={measure.k} exceeds m={m}")
        D = R = float(measure.k)
        A = float(m)
    else:  # pragma: no cover - every other kind is normalized
        raise RefusedMeasure(f"no learner parameters defined for {measure.label}")
    epsilon = math.sqrt(D / (R * A * K))
    return FtplParams(epsilon=epsilon, D=D, R=R, A=A)


@dataclass
class ScoreState:
    """Cumulative (g-transformed) relevance the learner sorts on."""

    accumulated: np.ndarray
    rounds_absorbed: int = 0

    @classmethod
    def zeros(cls, m: int) -> "ScoreState":
        return cls(accumulated=np.zeros(m, dtype=np.float64))

    @property
    def m(self) -> int:
        return self.accumulated.shape[0]

    def absorb(self, g_levels) -> None:
        g_levels = np.asarray(g_levels, dtype=np.float64)
        if g_levels.shape != self.accumulated.shape:
            raise ValueError("absorbed vector length must stay constant")
        self.accumulated += g_levels
        self.rounds_absorbed += 1


def ftpl_draw(state: ScoreState, params: FtplParams, rng: np.random.Generator) -> Permutation:
    """One perturbed-leader draw: fresh uniform noise, then the sort oracle."""
    perturbation = rng.uniform(0.0, params.scale, size=state.m)
    return sort_oracle(state.accumulated + perturbation)


def full_info_run(
    measure: MeasureSpec, stream, rng: np.random.Generator
) -> RegretTrace:
    """Baseline learner that sees the whole relevance vector every round.

    A fresh perturbation is drawn each round and the full (g-transformed)
    vector is absorbed after playing; the perturbation scale uses the
    round count as the update count.
    """
    _refuse_normalized(measure)
    stream = np.asarray(stream)
    T, m = stream.shape
    if T == 0:
        return build_trace(measure, np.empty(0), stream)
    _check_stream_levels(stream, measure)
    params = params_for(measure, m, measure.n, T)
    g_stream = measure.g_transform(stream)
    # Score in force at round t is everything absorbed strictly before t.
    prefix = np.vstack([np.zeros(m), np.cumsum(g_stream[:-1], axis=0)])
    pert = rng.uniform(0.0, params.scale, size=(T, m))
    pairwise = measure.kind == "pairwise"
    f_vec = np.zeros(m) if pairwise else measure.f_by_rank(m)
    values = _kernels.episode_values(
        prefix,
        np.arange(T, dtype=np.int64),
        np.full(T, -1, dtype=np.int64),
        pert,
        g_stream,
        f_vec,
        pairwise,
    )
    return build_trace(measure, values, stream)
