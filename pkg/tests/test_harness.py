import math

import numpy as np
import pytest

from toprank.adversaries import (
    AdversaryConfig,
    generate_stream,
    graded_base,
    noisy_fixed_base,
    read_stream,
    write_stream,
)
from toprank.experiment import ExperimentConfig, run_experiment
from toprank.ftpl import RefusedMeasure
from toprank.games import enumerate_relevance
from toprank.measures import get_measure
from toprank.rtop1f import run_episode
from toprank.traces import (
    RegretTrace,
    best_in_hindsight,
    brute_force_best,
    build_trace,
    fit_slope,
    read_trace_csv,
    traces_identical,
    write_trace_csv,
)


class TestAdversaries:
    def test_base_vector(self):
        np.testing.assert_array_equal(noisy_fixed_base(10), [1] * 5 + [0] * 5)
        np.testing.assert_array_equal(noisy_fixed_base(5), [1, 1, 1, 0, 0])

    def test_noiseless_reproduces_base(self):
        cfg = AdversaryConfig("noisy-fixed", m=6, T=50, seed=0, noise_sd=0.0)
        stream = generate_stream(cfg)
        np.testing.assert_array_equal(stream, np.tile(noisy_fixed_base(6), (50, 1)))

    def test_flip_rate_matches_gaussian_tail(self):
        # A coordinate flips only when the noise crosses the 0.5 threshold
        # against its base value: a one-sided tail of the noise law.
        sd = 0.2
        cfg = AdversaryConfig("noisy-fixed", m=10, T=10_000, seed=5, noise_sd=sd)
        stream = generate_stream(cfg)
        base = noisy_fixed_base(10)
        flips = (stream != base).mean()
        expected = 0.5 * math.erfc(0.5 / (sd * math.sqrt(2)))
        assert abs(flips - expected) <= 0.003

    def test_obliviousness(self):
        cfg = AdversaryConfig("noisy-fixed", m=5, T=200, seed=9)
        before = generate_stream(cfg)
        raw = before.tobytes()
        run_episode(get_measure("sumloss"), before, 200, seed=1)
        assert before.tobytes() == raw
        np.testing.assert_array_equal(generate_stream(cfg), before)

    def test_iid_probabilities(self):
        cfg = AdversaryConfig("iid", m=3, T=40_000, seed=2, probs=(0.9, 0.5, 0.1))
        stream = generate_stream(cfg)
        np.testing.assert_allclose(stream.mean(axis=0), [0.9, 0.5, 0.1], atol=0.01)

    def test_graded_base_and_noise(self):
        np.testing.assert_array_equal(graded_base(4, 3), [3, 2, 1, 0])
        cfg = AdversaryConfig("graded-noisy-fixed", m=4, T=30, seed=1, noise_sd=0.0, n=3)
        stream = generate_stream(cfg)
        np.testing.assert_array_equal(stream, np.tile([3, 2, 1, 0], (30, 1)))
        noisy = generate_stream(
            AdversaryConfig("graded-noisy-fixed", m=4, T=500, seed=1, noise_sd=0.4, n=3)
        )
        assert noisy.min() >= 0 and noisy.max() <= 3

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AdversaryConfig("noisy-fixed", m=3, T=10, noise_sd=-0.1)
        with pytest.raises(ValueError):
            AdversaryConfig("replay", m=3, T=10)
        with pytest.raises(ValueError):
            AdversaryConfig("iid", m=3, T=10, probs=(0.5,))
        with pytest.raises(ValueError):
            AdversaryConfig("martian", m=3, T=10)


class TestStreamFiles:
    def test_round_trip(self, tmp_path):
        stream = np.random.default_rng(3).integers(0, 4, size=(20, 5))
        path = tmp_path / "stream.txt"
        write_stream(path, stream, n=3)
        back, n = read_stream(path)
        assert n == 3
        np.testing.assert_array_equal(back, stream)

    def test_replay_echo_of_outcome_table(self, tmp_path):
        # Replaying the canonical 8 outcomes for m=3 echoes them in order.
        outcomes = enumerate_relevance(3)
        path = tmp_path / "outcomes.txt"
        write_stream(path, outcomes, n=1)
        cfg = AdversaryConfig("replay", m=3, T=8, path=str(path))
        np.testing.assert_array_equal(generate_stream(cfg), outcomes)

    def test_malformed_files(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("m=3 n=1\n0 0 0\n")
        with pytest.raises(ValueError):
            read_stream(bad)
        bad.write_text("m=3 n=1 T=2\n0 0\n0 0 0\n")
        with pytest.raises(ValueError):
            read_stream(bad)
        bad.write_text("m=3 n=1 T=2\n0 0 2\n0 0 0\n")
        with pytest.raises(ValueError):
            read_stream(bad)
        bad.write_text("m=3 n=1 T=3\n0 0 1\n0 0 0\n")
        with pytest.raises(ValueError):
            read_stream(bad)

    def test_replay_shape_checks(self, tmp_path):
        path = tmp_path / "s.txt"
        write_stream(path, np.zeros((5, 3), dtype=int), n=1)
        with pytest.raises(ValueError):
            generate_stream(AdversaryConfig("replay", m=4, T=5, path=str(path)))
        with pytest.raises(ValueError):
            generate_stream(AdversaryConfig("replay", m=3, T=9, path=str(path)))

    def test_replay_level_bound(self, tmp_path):
        path = tmp_path / "graded.txt"
        write_stream(path, np.full((5, 3), 2, dtype=int), n=2)
        with pytest.raises(ValueError):
            generate_stream(AdversaryConfig("replay", m=3, T=5, path=str(path), n=1))
        stream = generate_stream(AdversaryConfig("replay", m=3, T=5, path=str(path), n=3))
        assert stream.max() == 2


class TestBestInHindsight:
    def test_single_round(self):
        perm, value = best_in_hindsight(get_measure("sumloss"), np.array([[0, 1, 1]]))
        assert value == 3.0
        assert perm.ranks == (3, 1, 2)

    def test_empty_stream(self):
        perm, value = best_in_hindsight(get_measure("sumloss"), np.zeros((0, 4), dtype=int))
        assert perm.ranks == (1, 2, 3, 4)
        assert value == 0.0

    def test_constant_dcg_stream(self):
        from toprank.measures import ndcg_normalizer
        from toprank.rankings import Relevance

        row = (1, 0, 1, 0)
        stream = np.tile(row, (25, 1))
        perm, value = best_in_hindsight(get_measure("dcg"), stream)
        assert value == pytest.approx(25 * ndcg_normalizer(Relevance(row)), abs=1e-9)

    @pytest.mark.parametrize("name,n", [
        ("sumloss", 1), ("pairwise", 1), ("dcg", 1), ("prec@2", 1),
        ("ndcg", 1), ("map", 1), ("auc", 1),
    ])
    def test_agrees_with_brute_force(self, name, n):
        rng = np.random.default_rng(hash(name) % 2**32)
        meas = get_measure(name, n=n)
        exact = name in ("sumloss", "pairwise", "prec@2")
        for _ in range(40):
            T = int(rng.integers(1, 16))
            stream = rng.integers(0, 2, size=(T, 5))
            _, v1 = best_in_hindsight(meas, stream)
            _, v2 = brute_force_best(meas, stream)
            if exact:
                assert v1 == v2
            else:
                assert v1 == pytest.approx(v2, abs=1e-12)

    def test_graded_ndcg_agrees_with_brute_force(self):
        rng = np.random.default_rng(44)
        meas = get_measure("ndcg", n=3)
        for _ in range(40):
            stream = rng.integers(0, 4, size=(int(rng.integers(1, 12)), 4))
            _, v1 = best_in_hindsight(meas, stream)
            _, v2 = brute_force_best(meas, stream)
            assert v1 == pytest.approx(v2, abs=1e-12)

    def test_brute_force_m1(self):
        perm, value = brute_force_best(get_measure("sumloss"), np.array([[1], [0]]))
        assert perm.ranks == (1,) and value == 1.0


class TestTraces:
    def test_regret_nonnegative_at_horizon(self):
        stream = generate_stream(AdversaryConfig("iid", m=4, T=200, seed=3))
        for name in ("sumloss", "dcg", "prec@2"):
            trace = run_episode(get_measure(name), stream, 200, seed=4)
            assert trace.regret[-1] >= -1e-9

    def test_normalized_identity(self):
        stream = generate_stream(AdversaryConfig("noisy-fixed", m=4, T=150, seed=6))
        trace = run_episode(get_measure("sumloss"), stream, 150, seed=5)
        np.testing.assert_allclose(trace.norm_regret * trace.rounds, trace.regret, atol=1e-12)

    def test_csv_round_trip_exact(self, tmp_path):
        stream = generate_stream(AdversaryConfig("noisy-fixed", m=5, T=120, seed=7))
        trace = run_episode(get_measure("dcg"), stream, 120, seed=6)
        path = tmp_path / "trace.csv"
        write_trace_csv(path, trace)
        back = read_trace_csv(path)
        assert traces_identical(trace, back)

    def test_csv_round_trip_prec(self, tmp_path):
        stream = generate_stream(AdversaryConfig("noisy-fixed", m=5, T=60, seed=7))
        trace = run_episode(get_measure("prec@2"), stream, 60, seed=1)
        path = tmp_path / "trace.csv"
        write_trace_csv(path, trace)
        back = read_trace_csv(path)
        assert back.measure == trace.measure
        assert traces_identical(trace, back)

    def test_build_trace_validates_lengths(self):
        with pytest.raises(ValueError):
            build_trace(get_measure("sumloss"), np.zeros(3), np.zeros((4, 2), dtype=int))

    def test_csv_rejects_foreign_files(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,learner_value\n1,2.0\n")
        with pytest.raises(ValueError):
            read_trace_csv(bad)
        bad.write_text("# measure=sumloss k= n=1\nwrong,header\n")
        with pytest.raises(ValueError):
            read_trace_csv(bad)

    def test_average_traces_validation(self):
        from toprank.traces import average_traces

        stream = generate_stream(AdversaryConfig("noisy-fixed", m=3, T=30, seed=1))
        a = run_episode(get_measure("sumloss"), stream, 30, seed=1)
        b = run_episode(get_measure("dcg"), stream, 30, seed=1)
        with pytest.raises(ValueError):
            average_traces([])
        with pytest.raises(ValueError):
            average_traces([a, b])


class TestFitSlope:
    def _trace_from_regret(self, regret):
        T = regret.shape[0]
        t = np.arange(1, T + 1)
        return RegretTrace(
            measure=get_measure("sumloss"),
            learner_values=np.zeros(T),
            cum_learner=np.zeros(T),
            cum_best=np.zeros(T),
            regret=regret,
            norm_regret=regret / t,
        )

    def test_two_thirds_power_law(self):
        t = np.arange(1, 5001, dtype=float)
        fit = fit_slope(self._trace_from_regret(2.5 * t ** (2 / 3)), 10, 5000)
        assert fit.slope == pytest.approx(-1 / 3, abs=1e-6)

    def test_sqrt_power_law(self):
        t = np.arange(1, 5001, dtype=float)
        fit = fit_slope(self._trace_from_regret(0.7 * np.sqrt(t)), 10, 5000)
        assert fit.slope == pytest.approx(-1 / 2, abs=1e-6)

    def test_constant_normalized_regret(self):
        t = np.arange(1, 1001, dtype=float)
        fit = fit_slope(self._trace_from_regret(4.0 * t), 5, 1000)
        assert fit.slope == pytest.approx(0.0, abs=1e-9)

    def test_window_without_positive_regret(self):
        trace = self._trace_from_regret(np.zeros(100))
        with pytest.raises(ValueError):
            fit_slope(trace, 1, 100)
        with pytest.raises(ValueError):
            fit_slope(trace, 0, 10)


class TestRunExperiment:
    def test_deterministic_csv(self, tmp_path):
        adv = AdversaryConfig("noisy-fixed", m=4, T=120, seed=11)
        cfg = ExperimentConfig(get_measure("sumloss"), "rtop1f", adv, runs=2, seed=11)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run_experiment(cfg, out_path=p1)
        run_experiment(cfg, out_path=p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_full_info_dominates_on_shared_stream(self):
        adv = AdversaryConfig("noisy-fixed", m=6, T=2000, seed=12)
        rt = run_experiment(ExperimentConfig(get_measure("dcg"), "rtop1f", adv, runs=3, seed=1))
        fi = run_experiment(ExperimentConfig(get_measure("dcg"), "ftpl", adv, runs=3, seed=1))
        assert fi.norm_regret[-1] < rt.norm_regret[-1]

    def test_refuses_normalized(self):
        adv = AdversaryConfig("noisy-fixed", m=3, T=50, seed=0)
        for learner in ("rtop1f", "ftpl"):
            cfg = ExperimentConfig(get_measure("ndcg"), learner, adv, runs=1, seed=0)
            with pytest.raises(RefusedMeasure):
                run_experiment(cfg)

    def test_eq2_identity_through_harness(self):
        adv = AdversaryConfig("iid", m=5, T=150, seed=14)
        sl = run_experiment(ExperimentConfig(get_measure("sumloss"), "rtop1f", adv, runs=2, seed=3))
        pl = run_experiment(ExperimentConfig(get_measure("pairwise"), "rtop1f", adv, runs=2, seed=3))
        np.testing.assert_array_equal(sl.regret, pl.regret)
        np.testing.assert_array_equal(sl.norm_regret, pl.norm_regret)

    def test_svg_emission(self, tmp_path):
        adv = AdversaryConfig("noisy-fixed", m=4, T=150, seed=2)
        cfg = ExperimentConfig(get_measure("dcg"), "rtop1f", adv, runs=1, seed=2)
        svg = tmp_path / "chart.svg"
        run_experiment(cfg, out_path=tmp_path / "t.csv", svg_path=svg)
        text = svg.read_text()
        assert text.startswith("<svg") and "polyline" in text

    def test_svg_linear_fallback_without_positive_regret(self, tmp_path):
        # With a single object there is only one ranking, so regret is zero
        # throughout and the log-log chart has nothing to plot.
        adv = AdversaryConfig("noisy-fixed", m=1, T=40, seed=2, noise_sd=0.0)
        cfg = ExperimentConfig(get_measure("sumloss"), "rtop1f", adv, runs=1, seed=2)
        svg = tmp_path / "flat.svg"
        run_experiment(cfg, svg_path=svg)
        assert svg.read_text().startswith("<svg")

    def test_learner_validation(self):
        adv = AdversaryConfig("noisy-fixed", m=3, T=30, seed=0)
        with pytest.raises(ValueError):
            ExperimentConfig(get_measure("sumloss"), "bandit", adv)
        with pytest.raises(ValueError):
            ExperimentConfig(get_measure("sumloss"), "ftpl", adv, runs=0)
