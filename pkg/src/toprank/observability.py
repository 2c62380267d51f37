"""Observability analysis of the top-1 feedback game.

Whether a measure admits a sublinear-regret learner under top-1 feedback
comes down to linear algebra on the game matrices: the difference between
two rows of L must (globally) lie in the span of all transposed-signal
columns, or (locally) in the span contributed by the pair's neighborhood
alone. The span membership tests here run over floats, so verdicts use a
dual threshold: residuals at or below ``ACCEPT_TOL`` count as membership,
residuals at or above ``REJECT_TOL`` count as decisive failure, and the
dead zone in between raises rather than guessing.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .games import GameMatrices, signal_columns
from .rankings import Permutation

ACCEPT_TOL = 1e-9
REJECT_TOL = 1e-6

# Strictly rank-monotone measures for which the adjacent-swap neighbor
# structure is established; pairwise shares sumloss's structure because the
# two differ per outcome only by a relevance-dependent constant.
_NEIGHBOR_KINDS = frozenset({"sumloss", "pairwise", "dcg"})


class InconclusiveResidual(RuntimeError):
    """A span residual landed between the accept and reject thresholds."""

    def __init__(self, residual: float, pair=None):
        self.residual = residual
        self.pair = pair
        where = f" for pair {pair}" if pair is not None else ""
        super().__init__(
            f"residual {residual:.3e}{where} lies between accept ({ACCEPT_TOL:g}) "
            f"and reject ({REJECT_TOL:g}) thresholds"
        )


class ParetoWitnessError(RuntimeError):
    """The candidate distribution failed to make the action strictly optimal."""


def span_residual(v, basis) -> float:
    """Euclidean norm of the component of v orthogonal to span(basis).

    ``basis`` holds basis vectors as columns. Rank is revealed through an
    SVD so exactly-dependent columns cost nothing; an empty basis returns
    ``||v||``.
    """
    v = np.asarray(v, dtype=np.float64)
    basis = np.asarray(basis, dtype=np.float64)
    if basis.size == 0:
        return float(np.linalg.norm(v))
    if basis.ndim != 2 or basis.shape[0] != v.shape[0]:
        raise ValueError("basis must be a (dim, k) array matching v")
    q = _orthonormal_columns(basis)
    return float(np.linalg.norm(v - q @ (q.T @ v)))


def _orthonormal_columns(basis: np.ndarray) -> np.ndarray:
    u, s, _ = np.linalg.svd(basis, full_matrices=False)
    if s.size == 0:
        return u[:, :0]
    cutoff = s[0] * max(basis.shape) * np.finfo(np.float64).eps
    return u[:, s > cutoff]


def loss_difference_residual(game: GameMatrices, i: int, j: int, actions=None) -> float:
    """Residual of L[i] - L[j] against the signal columns of ``actions``
    (all actions when omitted)."""
    return span_residual(game.L[i] - game.L[j], signal_columns(game, actions))


@dataclass(frozen=True)
class GlobalCheck:
    holds: bool
    worst_residual: float
    worst_pair: tuple[int, int]


def check_global(game: GameMatrices) -> GlobalCheck:
    """Test every action pair's loss difference against all signal columns.

    Raises :class:`InconclusiveResidual` if no pair is decisively out of
    span but some pair exceeds the acceptance threshold.
    """
    q = _orthonormal_columns(signal_columns(game))
    # Residual components of each row; pairwise differences inherit them.
    # Differences are formed explicitly: a Gram-matrix shortcut cancels
    # catastrophically when rows share a large out-of-span component.
    resid = game.L - (game.L @ q) @ q.T
    worst = -1.0
    pair = (0, 0)
    for i in range(resid.shape[0] - 1):
        dist = np.linalg.norm(resid[i + 1 :] - resid[i], axis=1)
        j = int(np.argmax(dist))
        if dist[j] > worst:
            worst = float(dist[j])
            pair = (i, i + 1 + j)
    if worst >= REJECT_TOL:
        return GlobalCheck(holds=False, worst_residual=worst, worst_pair=pair)
    if worst <= ACCEPT_TOL:
        return GlobalCheck(holds=True, worst_residual=worst, worst_pair=pair)
    raise InconclusiveResidual(worst, pair)


def pareto_witness(game: GameMatrices, i: int) -> np.ndarray:
    """Outcome distribution under which action i is strictly optimal.

    Built as a product of per-object Bernoullis whose success probabilities
    decrease strictly along action i's ranking: the object at rank r gets
    probability (m - r + 1) / (m + 1). Strict optimality is then verified by
    enumerating every action's expected value; failure (ties are possible
    for measures that ignore order within a prefix, e.g. prec@k) raises
    :class:`ParetoWitnessError`.
    """
    m = game.m
    ranks = game.ranks[i].astype(np.float64)
    marginals = (m - ranks + 1.0) / (m + 1.0)
    outcomes = game.outcomes.astype(np.float64)
    p = np.prod(np.where(outcomes == 1, marginals, 1.0 - marginals), axis=1)
    values = game.L @ p
    own = values[i]
    others = np.delete(values, i)
    if others.size == 0:
        return p
    if game.measure.is_gain:
        gap = own - others.max()
    else:
        gap = others.min() - own
    if gap <= ACCEPT_TOL:
        raise ParetoWitnessError(
            f"action {i} is not strictly optimal under the decreasing-marginal "
            f"witness for {game.measure.label} (best competitor within {gap:.3e})"
        )
    return p


def is_neighbor_pair(a: Permutation, b: Permutation) -> bool:
    """True iff b is a with two objects at consecutive ranks swapped."""
    if a.m != b.m:
        return False
    diff = [o for o in range(a.m) if a.ranks[o] != b.ranks[o]]
    if len(diff) != 2:
        return False
    o1, o2 = diff
    return (
        abs(a.ranks[o1] - a.ranks[o2]) == 1
        and a.ranks[o1] == b.ranks[o2]
        and a.ranks[o2] == b.ranks[o1]
    )


def neighbor_pairs(game: GameMatrices) -> list[tuple[int, int]]:
    """All unordered neighboring action index pairs."""
    _require_neighbor_structure(game)
    perms = [game.action(i) for i in range(game.n_actions)]
    out = []
    for i in range(len(perms)):
        for j in range(i + 1, len(perms)):
            if is_neighbor_pair(perms[i], perms[j]):
                out.append((i, j))
    return out


def _require_neighbor_structure(game: GameMatrices) -> None:
    if game.measure.kind not in _NEIGHBOR_KINDS:
        raise ValueError(
            f"neighbor structure is only established for strictly rank-monotone "
            f"measures; refusing {game.measure.label}"
        )


def neighborhood_set(
    game: GameMatrices,
    i: int,
    j: int,
    samples: int = 32,
    rng: np.random.Generator | None = None,
) -> frozenset[int]:
    """Actions optimal on every sampled interior point of the shared face.

    The face of the pair's optimality cells is parameterized by expected
    relevances strictly decreasing along the shared ranking except for a tie
    at the swapped pair; each sample realizes such marginals as a product
    distribution over outcomes. This is a randomized inner approximation:
    the returned set can only over-approximate the true neighborhood if all
    sampled points happen to miss a separating direction.
    """
    _require_neighbor_structure(game)
    a, b = game.action(i), game.action(j)
    if not is_neighbor_pair(a, b):
        raise ValueError(f"actions {i} and {j} are not a neighboring pair")
    if rng is None:
        rng = np.random.default_rng(0)
    m = game.m
    # Swap position: the better rank of the two differing objects.
    diff = [o for o in range(m) if a.ranks[o] != b.ranks[o]]
    swap_pos = min(a.ranks[diff[0]], a.ranks[diff[1]])  # 1-based
    order = a.objects_by_rank
    outcomes = game.outcomes.astype(np.float64)
    keep: frozenset[int] | None = None
    for _ in range(samples):
        vals = np.sort(rng.uniform(0.05, 0.95, size=m - 1))[::-1]
        w = np.empty(m)
        w[:swap_pos] = vals[:swap_pos]
        w[swap_pos] = vals[swap_pos - 1]
        if swap_pos + 1 < m:
            w[swap_pos + 1 :] = vals[swap_pos:]
        marginals = np.empty(m)
        for pos, obj in enumerate(order):
            marginals[obj] = w[pos]
        p = np.prod(np.where(outcomes == 1, marginals, 1.0 - marginals), axis=1)
        values = game.L @ p
        opt = values.max() if game.measure.is_gain else values.min()
        here = frozenset(
            int(k) for k in np.flatnonzero(np.abs(values - opt) <= 1e-9 * max(1.0, abs(opt)))
        )
        keep = here if keep is None else keep & here
    return keep if keep is not None else frozenset()


@dataclass(frozen=True)
class LocalCheck:
    pair: tuple[int, int]
    neighborhood: frozenset[int]
    residual: float
    holds: bool


def check_local(
    game: GameMatrices,
    pair: tuple[int, int],
    samples: int = 32,
    rng: np.random.Generator | None = None,
    neighborhood: frozenset[int] | None = None,
) -> LocalCheck:
    """Span test of the pair's loss difference restricted to its neighborhood.

    ``neighborhood`` may be supplied to pin a known set; otherwise it is
    estimated by :func:`neighborhood_set`.
    """
    i, j = pair
    if neighborhood is None:
        neighborhood = neighborhood_set(game, i, j, samples=samples, rng=rng)
    residual = loss_difference_residual(game, i, j, actions=sorted(neighborhood))
    if residual >= REJECT_TOL:
        return LocalCheck(pair=(i, j), neighborhood=neighborhood, residual=residual, holds=False)
    if residual <= ACCEPT_TOL:
        return LocalCheck(pair=(i, j), neighborhood=neighborhood, residual=residual, holds=True)
    raise InconclusiveResidual(residual, (i, j))


@dataclass
class ObservabilityReport:
    """Outcome of one analysis run, serializable as text or CSV rows."""

    measure_label: str
    m: int
    check: str
    global_holds: bool | None = None
    worst_residual: float | None = None
    failing_pair: tuple[int, int] | None = None
    local_results: list[LocalCheck] = field(default_factory=list)
    neighbor_count: int | None = None
    pair_is_neighbor: bool | None = None
    pareto_failures: list[int] = field(default_factory=list)
    accept_tol: float = ACCEPT_TOL
    reject_tol: float = REJECT_TOL

    def to_text(self) -> str:
        lines = [
            f"measure={self.measure_label} m={self.m} check={self.check}",
            f"tolerances: accept<={self.accept_tol:g} reject>={self.reject_tol:g}",
        ]
        if self.global_holds is not None:
            lines.append(f"global observability: {'holds' if self.global_holds else 'FAILS'}")
            lines.append(f"worst residual {self.worst_residual:.6e} at pair {self.failing_pair}")
        if self.neighbor_count is not None:
            lines.append(f"neighboring action pairs: {self.neighbor_count}")
        if self.pair_is_neighbor is not None:
            lines.append(f"requested pair is neighboring: {self.pair_is_neighbor}")
        for res in self.local_results:
            verdict = "holds" if res.holds else "FAILS"
            lines.append(
                f"local observability at pair {res.pair}: {verdict} "
                f"(residual {res.residual:.6e}, neighborhood {sorted(res.neighborhood)})"
            )
        if self.check == "pareto":
            if self.pareto_failures:
                lines.append(f"actions without a strict witness: {self.pareto_failures}")
            else:
                lines.append("every action admits a strict optimality witness")
        return "\n".join(lines)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["check", "pair_i", "pair_j", "residual", "verdict"])
            if self.global_holds is not None:
                writer.writerow(
                    [
                        "global",
                        self.failing_pair[0],
                        self.failing_pair[1],
                        repr(float(self.worst_residual)),
                        "holds" if self.global_holds else "fails",
                    ]
                )
            for res in self.local_results:
                writer.writerow(
                    [
                        "local",
                        res.pair[0],
                        res.pair[1],
                        repr(float(res.residual)),
                        "holds" if res.holds else "fails",
                    ]
                )
            if self.check == "neighbors":
                writer.writerow(["neighbors", "", "", "", str(self.neighbor_count)])
            if self.check == "pareto":
                verdict = "fails" if self.pareto_failures else "holds"
                writer.writerow(["pareto", "", "", "", verdict])


def analyze(
    game: GameMatrices,
    check: str,
    pair: tuple[int, int] | None = None,
    samples: int = 32,
    rng: np.random.Generator | None = None,
) -> ObservabilityReport:
    """Entry point behind the ``analyze`` CLI subcommand."""
    report = ObservabilityReport(measure_label=game.measure.label, m=game.m, check=check)
    if check == "global":
        result = check_global(game)
        report.global_holds = result.holds
        report.worst_residual = result.worst_residual
        report.failing_pair = result.worst_pair
    elif check == "local":
        if pair is None:
            pair = (0, 1)
        report.local_results.append(check_local(game, pair, samples=samples, rng=rng))
    elif check == "neighbors":
        pairs = neighbor_pairs(game)
        report.neighbor_count = len(pairs)
        if pair is not None:
            report.pair_is_neighbor = is_neighbor_pair(game.action(pair[0]), game.action(pair[1]))
    elif check == "pareto":
        for i in range(game.n_actions):
            try:
                pareto_witness(game, i)
            except ParetoWitnessError:
                report.pareto_failures.append(i)
    else:
        raise ValueError(f"unknown check {check!r}")
    return report
