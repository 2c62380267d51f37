"""Blocked explore/exploit learner under top-1 feedback (rtop1f).

The horizon is cut into K equal blocks. Each block reserves m rounds,
drawn uniformly without replacement, to probe one object each by placing
it on top; the probed relevances form an unbiased estimate of the block's
average relevance vector. All other rounds exploit: they sort the
estimate accumulated from *previous* blocks plus fresh uniform noise.
Only the top-ranked object's relevance is ever read.

Two equivalent drivers are provided. :class:`RTop1FLearner` is the
stepwise state machine fed one scalar of feedback at a time;
:func:`run_episode` pre-draws the same randomness in the same order and
evaluates whole episodes through the array kernels. With equal seeds the
two produce identical rankings round for round.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ftpl import FtplParams, _check_stream_levels, params_for
from .measures import MeasureSpec, sort_oracle
from .rankings import Permutation, Relevance
from .traces import RegretTrace, build_trace


class ScheduleError(ValueError):
    """The horizon cannot accommodate the exploration schedule."""


class ProtocolError(RuntimeError):
    """The stepwise learner was driven out of contract."""


@dataclass(frozen=True)
class BlockSchedule:
    """Block layout: K blocks of block_len rounds, remainder on the last."""

    T: int
    m: int
    K: int
    block_len: int

    @property
    def lengths(self) -> tuple[int, ...]:
        sizes = [self.block_len] * self.K
        sizes[-1] += self.T - self.K * self.block_len
        return tuple(sizes)

    @property
    def starts(self) -> tuple[int, ...]:
        out, at = [], 0
        for size in self.lengths:
            out.append(at)
            at += size
        return tuple(out)

    def block_of(self, t: int) -> int:
        if not 0 <= t < self.T:
            raise ValueError(f"round {t} outside horizon {self.T}")
        return min(t // self.block_len, self.K - 1)


def plan_blocks(T: int, m: int) -> BlockSchedule:
    """Choose K near m^(-1/3) T^(2/3), clamped so every block fits m probes."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if T < m:
        raise ScheduleError(f"horizon T={T} cannot hold {m} exploration rounds")
    K = max(1, round(m ** (-1.0 / 3.0) * T ** (2.0 / 3.0)))
    if T // K < m:
        K = T // m
    return BlockSchedule(T=T, m=m, K=K, block_len=T // K)


def sample_exploration_times(rng: np.random.Generator, block_len: int, m: int) -> np.ndarray:
    """m distinct positions in the block, uniform without replacement.

    Position j of the result is the round that probes object j.
    """
    if block_len < m:
        raise ScheduleError(f"block of {block_len} rounds cannot hold {m} probes")
    return rng.permutation(block_len)[:m]


def sample_schedules_batch(
    rng: np.random.Generator, block_len: int, m: int, count: int
) -> np.ndarray:
    """``count`` independent exploration schedules at once; shape (count, m).

    Same law as :func:`sample_exploration_times` (uniformly random ordered
    m-subsets), vectorized for Monte-Carlo use.
    """
    if block_len < m:
        raise ScheduleError(f"block of {block_len} rounds cannot hold {m} probes")
    grid = np.broadcast_to(np.arange(block_len), (count, block_len)).copy()
    return rng.permuted(grid, axis=1)[:, :m]


def exploration_permutation(m: int, probe: int) -> Permutation:
    """Canonical probe ranking: the probed object on top, the rest by index."""
    order = [probe] + [o for o in range(m) if o != probe]
    return Permutation.from_objects_by_rank(order)


class RTop1FLearner:
    """Stepwise state machine for one episode.

    ``step(t)`` must be called with consecutive round indices starting at 0.
    It returns the ranking to play and, on exploration rounds, the object
    being probed; the caller then reports that object's relevance level via
    ``absorb_feedback`` before the block ends. Feedback for objects that
    were not probed, duplicated feedback, and out-of-range levels are
    rejected.
    """

    def __init__(self, measure: MeasureSpec, m: int, T: int, rng: np.random.Generator):
        self.measure = measure
        self.m = m
        self.rng = rng
        self.schedule = plan_blocks(T, m)
        self.params: FtplParams = params_for(measure, m, measure.n, self.schedule.K)
        self.s_hat = np.zeros(m, dtype=np.float64)
        self._r_hat = np.full(m, np.nan)
        self._probed: set[int] = set()
        self._next_t = 0
        self._block = -1
        self._probe_of_round: dict[int, int] = {}

    def step(self, t: int) -> tuple[Permutation, int | None]:
        if t != self._next_t:
            raise ProtocolError(f"expected round {self._next_t}, got {t}")
        if t >= self.schedule.T:
            raise ProtocolError(f"round {t} beyond horizon {self.schedule.T}")
        block = self.schedule.block_of(t)
        if block != self._block:
            self._begin_block(block)
        self._next_t += 1
        probe = self._probe_of_round.get(t)
        if probe is not None:
            self._probed.add(probe)
            return exploration_permutation(self.m, probe), probe
        perturbation = self.rng.uniform(0.0, self.params.scale, size=self.m)
        return sort_oracle(self.s_hat + perturbation), None

    def absorb_feedback(self, probe: int, level: int) -> None:
        if probe not in self._probed:
            raise ProtocolError(f"object {probe} was not probed in the current block")
        if not np.isnan(self._r_hat[probe]):
            raise ProtocolError(f"duplicate feedback for object {probe}")
        if not 0 <= level <= self.measure.n:
            raise ValueError(f"relevance level {level} outside 0..{self.measure.n}")
        self._r_hat[probe] = self.measure.g_scalar(int(level))

    def end_block(self) -> np.ndarray:
        """Fold the completed block's probes into the score state."""
        if self._block < 0:
            raise ProtocolError("no block in progress")
        if np.isnan(self._r_hat).any():
            missing = [int(o) for o in np.flatnonzero(np.isnan(self._r_hat))]
            raise ProtocolError(f"block incomplete: no feedback for objects {missing}")
        self.s_hat += self._r_hat
        self._r_hat = np.full(self.m, np.nan)
        self._probed = set()
        self._block = -1
        return self.s_hat

    def _begin_block(self, block: int) -> None:
        if self._block >= 0:
            self.end_block()
        self._block = block
        start = self.schedule.starts[block]
        length = self.schedule.lengths[block]
        times = sample_exploration_times(self.rng, length, self.m)
        self._probe_of_round = {start + int(pos): obj for obj, pos in enumerate(times)}


def play_stream(
    measure: MeasureSpec, stream, T: int, rng: np.random.Generator
) -> np.ndarray:
    """Drive the stepwise learner against a stream, one feedback scalar a round.

    Reference driver: the learner is only ever handed the relevance of the
    object it ranked first. Returns the per-round measure values.
    """
    stream = np.asarray(stream)
    m = stream.shape[1]
    learner = RTop1FLearner(measure, m, T, rng)
    values = np.empty(T)
    for t in range(T):
        sigma, probe = learner.step(t)
        rel = Relevance(tuple(int(v) for v in stream[t]), n=measure.n)
        values[t] = measure.evaluate(sigma, rel)
        if probe is not None:
            top_relevance = int(stream[t, sigma.top])
            learner.absorb_feedback(probe, top_relevance)
    return values


def run_episode(measure: MeasureSpec, stream, T: int, seed: int) -> RegretTrace:
    """Full episode through the array kernels.

    Randomness is consumed in the stepwise learner's order (per block: the
    exploration schedule, then one perturbation row per exploitation
    round), so a given seed yields the same decisions in both drivers.
    """
    stream = np.asarray(stream)
    if stream.shape[0] < T:
        raise ValueError(f"stream holds {stream.shape[0]} rounds, horizon is {T}")
    m = stream.shape[1]
    _check_stream_levels(stream[:T], measure)
    schedule = plan_blocks(T, m)
    params = params_for(measure, m, measure.n, schedule.K)
    rng = np.random.default_rng(seed)

    g_stream = measure.g_transform(stream[:T])
    expl_obj = np.full(T, -1, dtype=np.int64)
    block_of_t = np.empty(T, dtype=np.int64)
    pert = np.zeros((T, m))
    shat_blocks = np.zeros((schedule.K, m))
    r_hat = np.zeros(m)
    for k, (start, length) in enumerate(zip(schedule.starts, schedule.lengths)):
        if k > 0:
            shat_blocks[k] = shat_blocks[k - 1] + r_hat
        block_of_t[start : start + length] = k
        times = sample_exploration_times(rng, length, m)
        expl_obj[start + times] = np.arange(m)
        exploit_rows = start + np.flatnonzero(expl_obj[start : start + length] < 0)
        pert[exploit_rows] = rng.uniform(0.0, params.scale, size=(exploit_rows.size, m))
        r_hat = g_stream[start + times, np.arange(m)]

    pairwise = measure.kind == "pairwise"
    f_vec = np.zeros(m) if pairwise else measure.f_by_rank(m)
    values = _kernels.episode_values(
        shat_blocks, block_of_t, expl_obj, pert, g_stream, f_vec, pairwise
    )
    return build_trace(measure, values, stream[:T])
