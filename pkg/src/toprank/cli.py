"""Command-line entry points: simulate, analyze, besthindsight.

Exit codes: 0 success, 2 invalid configuration, 3 refused measure/learner
combination (normalized measure with any learner), 4 inconclusive
observability residual.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .adversaries import AdversaryConfig, read_stream
from .experiment import ExperimentConfig, run_experiment
from .ftpl import RefusedMeasure
from .games import build_game
from .measures import get_measure
from .observability import InconclusiveResidual, analyze
from .traces import best_in_hindsight, fit_slope

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_REFUSED = 3
EXIT_INCONCLUSIVE = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toprank",
        description="Online ranking under top-1 relevance feedback: "
        "simulations, observability analysis, hindsight oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a learner against a generated stream")
    sim.add_argument("--measure", required=True,
                     help="sumloss | pairwise | dcg | prec@K | ndcg | map | auc")
    sim.add_argument("--learner", choices=("rtop1f", "ftpl"), default="rtop1f",
                     help="top-1 feedback learner or full-information baseline")
    sim.add_argument("--m", type=int, required=True, help="number of objects")
    sim.add_argument("--T", type=int, required=True, help="number of rounds")
    sim.add_argument("--runs", type=int, default=1, help="learner replicates to average")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--adversary", choices=("noisy-fixed", "iid", "replay"),
                     default="noisy-fixed")
    sim.add_argument("--noise-sd", type=float, default=0.2)
    sim.add_argument("--levels", type=int, default=1,
                     help="max relevance level n; n>1 switches to the graded adversary")
    sim.add_argument("--probs", default=None,
                     help="comma-separated per-object probabilities for the iid adversary")
    sim.add_argument("--replay", default=None, help="stream file for the replay adversary")
    sim.add_argument("--out", required=True, help="averaged trace CSV path")
    sim.add_argument("--svg", default=None, help="optional normalized-regret chart")
    sim.add_argument("--fit-from", type=int, default=None,
                     help="also report the log-log slope fitted from this round on")

    ana = sub.add_parser("analyze", help="observability analysis of a measure's game")
    ana.add_argument("--measure", required=True)
    ana.add_argument("--m", type=int, required=True)
    ana.add_argument("--check", choices=("global", "local", "neighbors", "pareto"),
                     required=True)
    ana.add_argument("--pair", type=int, nargs=2, metavar=("I", "J"), default=None,
                     help="1-based action indices in lexicographic order")
    ana.add_argument("--samples", type=int, default=32,
                     help="sampled face points for neighborhood estimation")
    ana.add_argument("--out", default=None, help="machine-readable CSV report path")

    best = sub.add_parser("besthindsight", help="best fixed ranking for a stream file")
    best.add_argument("--measure", required=True)
    best.add_argument("--stream", required=True, help="stream file path")
    return parser


def _cmd_simulate(args) -> int:
    measure = get_measure(args.measure, n=args.levels)
    kind = args.adversary
    if kind == "noisy-fixed" and args.levels > 1:
        kind = "graded-noisy-fixed"
    probs = None
    if args.probs is not None:
        probs = tuple(float(p) for p in args.probs.split(","))
    adversary = AdversaryConfig(
        kind=kind,
        m=args.m,
        T=args.T,
        seed=args.seed,
        noise_sd=args.noise_sd,
        probs=probs,
        path=args.replay,
        n=args.levels,
    )
    config = ExperimentConfig(
        measure=measure, learner=args.learner, adversary=adversary,
        runs=args.runs, seed=args.seed,
    )
    trace = run_experiment(config, out_path=args.out, svg_path=args.svg)
    print(f"wrote {args.out}: T={trace.T} final regret {trace.final_regret():.6g} "
          f"normalized {trace.norm_regret[-1]:.6g}")
    if args.fit_from is not None:
        fit = fit_slope(trace, args.fit_from, trace.T)
        print(f"log-log slope on [{fit.t_start}, {fit.t_end}]: {fit.slope:.4f}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    measure = get_measure(args.measure)
    game = build_game(measure, args.m)
    pair = None
    if args.pair is not None:
        i, j = args.pair
        if not (1 <= i <= game.n_actions and 1 <= j <= game.n_actions) or i == j:
            raise ValueError(f"pair must be two distinct indices in 1..{game.n_actions}")
        pair = (i - 1, j - 1)
    report = analyze(game, args.check, pair=pair, samples=args.samples,
                     rng=np.random.default_rng(0))
    print(report.to_text())
    if args.out:
        report.write_csv(args.out)
    return EXIT_OK


def _cmd_besthindsight(args) -> int:
    stream, n = read_stream(args.stream)
    if n > 1 and args.measure not in ("dcg", "ndcg"):
        raise ValueError(f"{args.measure} takes binary relevance; stream has levels up to {n}")
    measure = get_measure(args.measure, n=n if args.measure in ("dcg", "ndcg") else 1)
    perm, value = best_in_hindsight(measure, stream)
    print(f"measure={measure.label} T={stream.shape[0]} m={stream.shape[1]}")
    print(f"best ranking (rank of each object): {' '.join(str(r) for r in perm.ranks)}")
    print(f"total value: {value!r}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; normalize other codes through it
        return int(exc.code) if exc.code else EXIT_OK
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_besthindsight(args)
    except RefusedMeasure as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except InconclusiveResidual as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
