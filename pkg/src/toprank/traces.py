"""Regret traces, best-in-hindsight oracles, and slope fitting.

A trace records, per round, the learner's realized measure value and the
running value of the best fixed ranking in hindsight; regret is their
cumulative difference oriented so that it is non-negative at the horizon.
The ``pairwise`` measure rides on the rank-weighted sum everywhere: per
round the two differ by s(s+1)/2 where s counts the relevant objects, a
constant in the ranking, so optimizers and regrets transfer exactly.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .games import enumerate_permutations
from .measures import GAIN, MeasureSpec, ndcg_normalizer, sort_oracle
from .rankings import Permutation, Relevance

BRUTE_FORCE_MAX_M = 8


@dataclass
class RegretTrace:
    measure: MeasureSpec
    learner_values: np.ndarray
    cum_learner: np.ndarray
    cum_best: np.ndarray
    regret: np.ndarray
    norm_regret: np.ndarray

    @property
    def T(self) -> int:
        return self.learner_values.shape[0]

    @property
    def rounds(self) -> np.ndarray:
        return np.arange(1, self.T + 1)

    def final_regret(self) -> float:
        return float(self.regret[-1]) if self.T else 0.0


def traces_identical(a: RegretTrace, b: RegretTrace) -> bool:
    return (
        a.measure == b.measure
        and np.array_equal(a.learner_values, b.learner_values)
        and np.array_equal(a.cum_learner, b.cum_learner)
        and np.array_equal(a.cum_best, b.cum_best)
        and np.array_equal(a.regret, b.regret)
        and np.array_equal(a.norm_regret, b.norm_regret)
    )


def _pairwise_shift(stream: np.ndarray) -> np.ndarray:
    """Per-round constant separating the pair-count from the rank-weighted sum."""
    s = stream.sum(axis=1).astype(np.float64)
    return s * (s + 1.0) / 2.0


def running_best(measure: MeasureSpec, stream: np.ndarray) -> np.ndarray:
    """Cumulative value of the best fixed ranking over every prefix.

    Supported for the measures an online learner can run under top-1
    feedback; for those the optimum over rankings sorts the aggregated
    (g-transformed) relevance, so each prefix costs one sort.
    """
    stream = np.asarray(stream)
    kind = measure.kind
    if kind == "pairwise":
        sums = running_best(MeasureSpec("sumloss"), stream)
        return sums - np.cumsum(_pairwise_shift(stream))
    if kind not in ("sumloss", "dcg", "prec"):
        raise ValueError(f"running best-in-hindsight unsupported for {measure.label}")
    prefix = np.cumsum(measure.g_transform(stream), axis=0)
    ordered = np.sort(prefix, axis=1)[:, ::-1]
    return ordered @ measure.f_by_rank(stream.shape[1])


def build_trace(measure: MeasureSpec, learner_values, stream) -> RegretTrace:
    values = np.asarray(learner_values, dtype=np.float64)
    stream = np.asarray(stream)
    if values.shape[0] != stream.shape[0]:
        raise ValueError("one relevance vector per learner value required")
    cum_learner = np.cumsum(values)
    if values.shape[0] == 0:
        empty = np.empty(0)
        return RegretTrace(measure, values, cum_learner, empty.copy(), empty.copy(), empty.copy())
    cum_best = running_best(measure, stream)
    if measure.polarity == GAIN:
        regret = cum_best - cum_learner
    else:
        regret = cum_learner - cum_best
    norm = regret / np.arange(1, values.shape[0] + 1)
    return RegretTrace(measure, values, cum_learner, cum_best, regret, norm)


def best_in_hindsight(measure: MeasureSpec, stream) -> tuple[Permutation, float]:
    """Best fixed ranking and its total value over the whole stream.

    Sorting the aggregated relevance solves every measure of the
    rank-weighted family; map and auc fall back to exhaustive search over
    the m! rankings (m <= 8).
    """
    stream = np.asarray(stream)
    T, m = stream.shape
    if T == 0:
        return Permutation.identity(m), 0.0
    kind = measure.kind
    if kind in ("sumloss", "dcg", "prec"):
        agg = measure.g_transform(stream).sum(axis=0)
        perm = sort_oracle(agg)
        value = float(measure.f_by_rank(m)[perm.as_array() - 1] @ agg)
        return perm, value
    if kind == "pairwise":
        perm, sum_value = best_in_hindsight(MeasureSpec("sumloss"), stream)
        return perm, sum_value - float(_pairwise_shift(stream).sum())
    if kind == "ndcg":
        gains = measure.g_transform(stream)
        agg = np.zeros(m)
        zero_rounds = 0
        for row_gain, row in zip(gains, stream):
            rel = Relevance(tuple(int(v) for v in row), n=measure.n)
            if rel.total == 0:
                zero_rounds += 1
            else:
                agg += row_gain / ndcg_normalizer(rel)
        perm = sort_oracle(agg)
        value = float(measure.f_by_rank(m)[perm.as_array() - 1] @ agg) + zero_rounds
        return perm, value
    # map / auc: no sorting shortcut; group duplicate rounds and enumerate.
    if m > BRUTE_FORCE_MAX_M:
        raise ValueError(f"{measure.label} best-in-hindsight needs m <= {BRUTE_FORCE_MAX_M}")
    rows, counts = np.unique(stream, axis=0, return_counts=True)
    rels = [Relevance(tuple(int(v) for v in row), n=measure.n) for row in rows]
    best_perm, best_value = None, None
    for ranks in enumerate_permutations(m):
        perm = Permutation(tuple(int(r) for r in ranks))
        value = float(
            sum(c * measure.evaluate(perm, rel) for c, rel in zip(counts, rels))
        )
        better = (
            best_value is None
            or (measure.polarity == GAIN and value > best_value)
            or (measure.polarity != GAIN and value < best_value)
        )
        if better:
            best_perm, best_value = perm, value
    return best_perm, best_value


def brute_force_best(measure: MeasureSpec, stream) -> tuple[Permutation, float]:
    """Ground-truth optimum by scoring every ranking against every round."""
    stream = np.asarray(stream)
    T, m = stream.shape
    if m > BRUTE_FORCE_MAX_M:
        raise ValueError(f"brute force needs m <= {BRUTE_FORCE_MAX_M}")
    if T == 0:
        return Permutation.identity(m), 0.0
    rels = [Relevance(tuple(int(v) for v in row), n=measure.n) for row in stream]
    best_perm, best_value = None, None
    for ranks in enumerate_permutations(m):
        perm = Permutation(tuple(int(r) for r in ranks))
        value = float(sum(measure.evaluate(perm, rel) for rel in rels))
        better = (
            best_value is None
            or (measure.polarity == GAIN and value > best_value)
            or (measure.polarity != GAIN and value < best_value)
        )
        if better:
            best_perm, best_value = perm, value
    return best_perm, best_value


@dataclass(frozen=True)
class SlopeFit:
    t_start: int
    t_end: int
    slope: float
    intercept: float
    residual: float


def fit_slope(trace: RegretTrace, t_start: int, t_end: int) -> SlopeFit:
    """Least-squares slope of log normalized regret against log round index.

    Rounds with non-positive regret carry no information on a log scale and
    are dropped; an empty window raises.
    """
    if t_start < 1:
        raise ValueError("t_start must be >= 1")
    t = trace.rounds
    mask = (t >= t_start) & (t <= t_end) & (trace.norm_regret > 0)
    if mask.sum() < 2:
        raise ValueError("no positive-regret rounds to fit in the window")
    x = np.log(t[mask].astype(np.float64))
    y = np.log(trace.norm_regret[mask])
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return SlopeFit(t_start=t_start, t_end=t_end, slope=float(coef[0]), intercept=float(coef[1]), residual=rms)


_CSV_COLUMNS = ("t", "learner_value", "cum_learner", "cum_best", "regret", "norm_regret")


def write_trace_csv(path, trace: RegretTrace) -> None:
    meta = f"# measure={trace.measure.kind} k={trace.measure.k or ''} n={trace.measure.n}"
    with open(path, "w", newline="") as fh:
        fh.write(meta + "\n")
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for t in range(trace.T):
            writer.writerow(
                [
                    t + 1,
                    repr(float(trace.learner_values[t])),
                    repr(float(trace.cum_learner[t])),
                    repr(float(trace.cum_best[t])),
                    repr(float(trace.regret[t])),
                    repr(float(trace.norm_regret[t])),
                ]
            )


def read_trace_csv(path) -> RegretTrace:
    with open(path, newline="") as fh:
        meta = fh.readline().strip()
        if not meta.startswith("# measure="):
            raise ValueError(f"{path}: missing measure metadata line")
        fields = dict(part.split("=", 1) for part in meta[2:].split())
        measure = MeasureSpec(
            fields["measure"],
            k=int(fields["k"]) if fields.get("k") else None,
            n=int(fields.get("n", "1")),
        )
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != _CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header}")
        cols: list[list[float]] = [[] for _ in _CSV_COLUMNS]
        for row in reader:
            for store, cell in zip(cols, row):
                store.append(float(cell))
    return RegretTrace(
        measure=measure,
        learner_values=np.array(cols[1]),
        cum_learner=np.array(cols[2]),
        cum_best=np.array(cols[3]),
        regret=np.array(cols[4]),
        norm_regret=np.array(cols[5]),
    )


def average_traces(traces: list[RegretTrace]) -> RegretTrace:
    """Pointwise arithmetic mean across replicate runs on one shared stream."""
    if not traces:
        raise ValueError("nothing to average")
    first = traces[0]
    for other in traces[1:]:
        if other.measure != first.measure or other.T != first.T:
            raise ValueError("replicates must share measure and horizon")
    return RegretTrace(
        measure=first.measure,
        learner_values=np.mean([tr.learner_values for tr in traces], axis=0),
        cum_learner=np.mean([tr.cum_learner for tr in traces], axis=0),
        cum_best=first.cum_best.copy(),
        regret=np.mean([tr.regret for tr in traces], axis=0),
        norm_regret=np.mean([tr.norm_regret for tr in traces], axis=0),
    )
