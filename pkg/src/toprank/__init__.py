"""Online ranking of a fixed object set under top-1 relevance feedback.

The library covers the full pipeline: ranking measures and their component
decompositions, the dense loss/feedback/signal matrices of the induced
partial-information game, observability analysis of those matrices, a
blocked explore/exploit learner that only ever sees the top-ranked
object's relevance, its full-information baseline, and an experiment
harness with reproducible adversaries and regret traces.
"""
from .adversaries import AdversaryConfig, generate_stream, read_stream, write_stream
from .experiment import ExperimentConfig, run_experiment
from .ftpl import FtplParams, RefusedMeasure, ScoreState, ftpl_draw, full_info_run, params_for
from .games import GameMatrices, SignalMatrix, build_game, enumerate_permutations, \
    enumerate_relevance, signal_matrix
from .measures import MeasureSpec, get_measure, sort_oracle
from .observability import InconclusiveResidual, ObservabilityReport, check_global, \
    check_local, is_neighbor_pair, neighborhood_set, pareto_witness, span_residual
from .rankings import Permutation, Relevance
from .rtop1f import BlockSchedule, RTop1FLearner, plan_blocks, run_episode
from .traces import RegretTrace, SlopeFit, best_in_hindsight, brute_force_best, \
    fit_slope, read_trace_csv, write_trace_csv

__version__ = "0.1.0"

__all__ = [
    "AdversaryConfig",
    "BlockSchedule",
    "ExperimentConfig",
    "FtplParams",
    "GameMatrices",
    "InconclusiveResidual",
    "MeasureSpec",
    "ObservabilityReport",
    "Permutation",
    "RefusedMeasure",
    "RegretTrace",
    "Relevance",
    "RTop1FLearner",
    "ScoreState",
    "SignalMatrix",
    "SlopeFit",
    "best_in_hindsight",
    "brute_force_best",
    "build_game",
    "check_global",
    "check_local",
    "enumerate_permutations",
    "enumerate_relevance",
    "fit_slope",
    "ftpl_draw",
    "full_info_run",
    "generate_stream",
    "get_measure",
    "is_neighbor_pair",
    "neighborhood_set",
    "params_for",
    "pareto_witness",
    "plan_blocks",
    "read_stream",
    "read_trace_csv",
    "run_episode",
    "run_experiment",
    "signal_matrix",
    "sort_oracle",
    "span_residual",
    "write_stream",
    "write_trace_csv",
    "__version__",
]
