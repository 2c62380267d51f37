import numpy as np
import pytest

from toprank import cli
from toprank.adversaries import write_stream
from toprank.games import enumerate_relevance


class TestSimulate:
    def test_basic_run_writes_trace(self, tmp_path, capsys):
        out = tmp_path / "trace.csv"
        code = cli.main([
            "simulate", "--measure", "sumloss", "--m", "4", "--T", "120",
            "--runs", "2", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        assert out.exists()
        header = out.read_text().splitlines()
        assert header[1] == "t,learner_value,cum_learner,cum_best,regret,norm_regret"

    def test_ftpl_learner_and_svg(self, tmp_path):
        out, svg = tmp_path / "t.csv", tmp_path / "t.svg"
        code = cli.main([
            "simulate", "--measure", "dcg", "--learner", "ftpl", "--m", "4",
            "--T", "200", "--seed", "1", "--out", str(out), "--svg", str(svg),
        ])
        assert code == 0 and svg.exists()

    @pytest.mark.parametrize("measure", ["ndcg", "map", "auc"])
    def test_normalized_measures_exit_3(self, tmp_path, capsys, measure):
        code = cli.main([
            "simulate", "--measure", measure, "--m", "3", "--T", "60",
            "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 3
        err = capsys.readouterr().err
        assert "sublinear" in err

    def test_unknown_measure_exit_2(self, tmp_path):
        code = cli.main([
            "simulate", "--measure", "mrr", "--m", "3", "--T", "60",
            "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 2

    def test_horizon_too_short_exit_2(self, tmp_path):
        code = cli.main([
            "simulate", "--measure", "sumloss", "--m", "5", "--T", "3",
            "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 2

    def test_missing_required_flag_exit_2(self, tmp_path):
        code = cli.main(["simulate", "--measure", "sumloss", "--m", "3"])
        assert code == 2

    def test_replay_adversary(self, tmp_path):
        stream_path = tmp_path / "stream.txt"
        write_stream(stream_path, np.tile([1, 0, 0], (80, 1)), n=1)
        code = cli.main([
            "simulate", "--measure", "sumloss", "--m", "3", "--T", "80",
            "--adversary", "replay", "--replay", str(stream_path),
            "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 0

    def test_graded_levels(self, tmp_path):
        code = cli.main([
            "simulate", "--measure", "dcg", "--m", "4", "--T", "100",
            "--levels", "3", "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 0

    def test_iid_probs(self, tmp_path):
        code = cli.main([
            "simulate", "--measure", "sumloss", "--m", "3", "--T", "60",
            "--adversary", "iid", "--probs", "0.8,0.5,0.1",
            "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 0
        bad = cli.main([
            "simulate", "--measure", "sumloss", "--m", "3", "--T", "60",
            "--adversary", "iid", "--probs", "0.8,0.5",
            "--out", str(tmp_path / "t.csv"),
        ])
        assert bad == 2

    def test_fit_from_reports_slope(self, tmp_path, capsys):
        code = cli.main([
            "simulate", "--measure", "dcg", "--m", "4", "--T", "400",
            "--runs", "2", "--out", str(tmp_path / "t.csv"), "--fit-from", "50",
        ])
        assert code == 0
        assert "slope" in capsys.readouterr().out


class TestAnalyze:
    def test_global_sumloss(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = cli.main([
            "analyze", "--measure", "sumloss", "--m", "3", "--check", "global",
            "--out", str(out),
        ])
        assert code == 0
        assert "holds" in capsys.readouterr().out
        assert out.exists()

    def test_local_pair_one_based(self, capsys):
        code = cli.main([
            "analyze", "--measure", "sumloss", "--m", "3", "--check", "local",
            "--pair", "1", "2",
        ])
        assert code == 0
        assert "FAILS" in capsys.readouterr().out

    def test_neighbors_and_pareto(self, capsys):
        assert cli.main(["analyze", "--measure", "sumloss", "--m", "3",
                         "--check", "neighbors"]) == 0
        assert cli.main(["analyze", "--measure", "prec@2", "--m", "3",
                         "--check", "pareto"]) == 0

    def test_bad_pair_exit_2(self):
        code = cli.main([
            "analyze", "--measure", "sumloss", "--m", "3", "--check", "local",
            "--pair", "1", "9",
        ])
        assert code == 2

    def test_prec_local_refused_exit_2(self):
        code = cli.main([
            "analyze", "--measure", "prec@2", "--m", "3", "--check", "local",
            "--pair", "1", "2",
        ])
        assert code == 2

    def test_inconclusive_exit_4(self, monkeypatch):
        from toprank.observability import InconclusiveResidual

        def fake_analyze(*args, **kwargs):
            raise InconclusiveResidual(1e-8, (0, 1))

        monkeypatch.setattr(cli, "analyze", fake_analyze)
        code = cli.main(["analyze", "--measure", "sumloss", "--m", "3",
                         "--check", "global"])
        assert code == 4


class TestBestHindsight:
    def test_reports_best(self, tmp_path, capsys):
        path = tmp_path / "stream.txt"
        write_stream(path, enumerate_relevance(3), n=1)
        code = cli.main(["besthindsight", "--measure", "sumloss", "--stream", str(path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "best ranking" in out and "total value" in out

    def test_missing_file_exit_2(self, tmp_path):
        code = cli.main(["besthindsight", "--measure", "sumloss",
                         "--stream", str(tmp_path / "nope.txt")])
        assert code == 2

    def test_graded_stream_with_binary_measure_exit_2(self, tmp_path):
        path = tmp_path / "graded.txt"
        write_stream(path, np.full((4, 3), 2, dtype=int), n=3)
        code = cli.main(["besthindsight", "--measure", "sumloss", "--stream", str(path)])
        assert code == 2
        assert cli.main(["besthindsight", "--measure", "dcg", "--stream", str(path)]) == 0
