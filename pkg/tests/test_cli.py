import numpy as np
import pytest

from minmeanmax.circuits import batcher_bitonic, format_network, optimal_network_8
from minmeanmax.classifiers import load_dataset_csv
from minmeanmax.cli import main
from minmeanmax.sexpr import parse_expr


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def spread_file(tmp_path):
    path = tmp_path / "spread.txt"
    path.write_text("(diff s0 s1)\n")
    return str(path)


@pytest.fixture
def frames_file(tmp_path):
    path = tmp_path / "frames.csv"
    path.write_text("5,3\n2,2\n1,4\n")
    return str(path)


class TestEval:
    def test_values_per_row(self, capsys, spread_file, frames_file):
        code, out, _ = run(capsys, "eval", spread_file, frames_file)
        assert code == 0
        assert out.splitlines() == ["2", "0", "-3"]

    def test_significant_digits(self, capsys, tmp_path, spread_file):
        frames = tmp_path / "f.csv"
        frames.write_text("0.1234567890123456,0\n")
        code, out, _ = run(capsys, "eval", spread_file, str(frames))
        assert code == 0
        assert out.strip() == "0.123456789012"

    def test_parse_error_exit(self, capsys, tmp_path, frames_file):
        bad = tmp_path / "bad.txt"
        bad.write_text("(min s0")
        code, _, err = run(capsys, "eval", str(bad), frames_file)
        assert code == 2
        assert "error" in err

    def test_malformed_frame_exit(self, capsys, tmp_path, spread_file):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,two\n")
        code, _, _ = run(capsys, "eval", spread_file, str(bad))
        assert code == 2

    def test_width_mismatch_exit(self, capsys, tmp_path):
        expr = tmp_path / "e.txt"
        expr.write_text("s5\n")
        frames = tmp_path / "f.csv"
        frames.write_text("1,2\n")
        code, _, _ = run(capsys, "eval", str(expr), str(frames))
        assert code == 3

    def test_missing_file_exit(self, capsys, frames_file):
        code, _, _ = run(capsys, "eval", "/does/not/exist", frames_file)
        assert code == 3


class TestSynthQuantile:
    def test_extremes(self, capsys):
        code, out, err = run(capsys, "synth-quantile", "2", "1")
        assert code == 0
        assert out.strip() == "(min s0 s1)"
        assert "size: 3" in err and "depth: 1" in err
        code, out, _ = run(capsys, "synth-quantile", "2", "2")
        assert out.strip() == "(max s0 s1)"

    def test_output_is_parseable_and_correct(self, capsys):
        code, out, _ = run(capsys, "synth-quantile", "5", "3", "--source", "bitonic")
        assert code == 0
        circuit = parse_expr(out.strip())
        from minmeanmax.expr import evaluate

        rng = np.random.default_rng(0)
        frames = rng.normal(size=(500, 5))
        np.testing.assert_array_equal(
            np.asarray(evaluate(circuit, frames)), np.sort(frames, axis=1)[:, 2]
        )

    def test_opt8_requires_width_8(self, capsys):
        code, _, err = run(capsys, "synth-quantile", "6", "2", "--source", "opt8")
        assert code == 2
        assert "opt8" in err

    def test_bad_rank(self, capsys):
        code, _, _ = run(capsys, "synth-quantile", "4", "9")
        assert code == 2


class TestVerifyNetwork:
    def test_sorting_network(self, capsys, tmp_path):
        path = tmp_path / "net.txt"
        path.write_text(format_network(optimal_network_8()))
        code, out, _ = run(capsys, "verify-network", str(path))
        assert code == 0
        assert out.strip() == "sorts: yes, depth: 6, comparators: 19"

    def test_non_sorting_network(self, capsys, tmp_path):
        path = tmp_path / "net.txt"
        path.write_text("width 3\n0:1\n")
        code, out, _ = run(capsys, "verify-network", str(path))
        assert code == 1
        assert "sorts: no" in out

    def test_malformed_network(self, capsys, tmp_path):
        path = tmp_path / "net.txt"
        path.write_text("w 3\n")
        code, _, _ = run(capsys, "verify-network", str(path))
        assert code == 2


class TestGenData:
    def test_writes_loadable_dataset(self, capsys, tmp_path):
        out_csv = tmp_path / "ds.csv"
        code, out, _ = run(
            capsys, "gen-data", str(out_csv), "--per-class", "20", "--seed", "3"
        )
        assert code == 0
        ds = load_dataset_csv(out_csv)
        assert len(ds) == 40
        assert ds.width == 8

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "gen-data", str(a), "--per-class", "10", "--seed", "5")
        run(capsys, "gen-data", str(b), "--per-class", "10", "--seed", "5")
        assert a.read_text() == b.read_text()

    def test_bad_width(self, capsys, tmp_path):
        code, _, _ = run(capsys, "gen-data", str(tmp_path / "x.csv"), "--width", "3")
        assert code == 3


class TestTrainClassify:
    def test_round_trip_reproduces_metrics(self, capsys, tmp_path):
        data = tmp_path / "train.csv"
        run(
            capsys, "gen-data", str(data),
            "--per-class", "60", "--shift-low", "-5", "--shift-high", "5",
            "--seed", "11",
        )
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(
            "population_size = 60\ngenerations = 10\n"
            "degree_zero_only = true\nseed = 4\n"
        )
        clf_path = tmp_path / "clf.txt"
        code, _, train_err = run(
            capsys, "train", str(data), "--config", str(cfg), "--out", str(clf_path)
        )
        assert code == 0
        train_metrics = [
            line for line in train_err.splitlines()
            if line.split(":")[0] in ("accuracy", "coverage", "decided")
            or line.startswith("confusion")
        ]
        code, cls_out, _ = run(capsys, "classify", str(clf_path), str(data))
        assert code == 0
        lines = cls_out.splitlines()
        verdicts, metric_lines = lines[:120], lines[120:]
        assert all(v in ("1", "2", "abstain") for v in verdicts)
        assert metric_lines == train_metrics

    def test_train_to_stdout(self, capsys, tmp_path):
        data = tmp_path / "train.csv"
        run(capsys, "gen-data", str(data), "--per-class", "15", "--seed", "2")
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("population_size = 20\ngenerations = 2\nseed = 1\n")
        code, out, _ = run(capsys, "train", str(data), "--config", str(cfg))
        assert code == 0
        assert out.splitlines()[0] == "Z"

    def test_seed_override_changes_run(self, capsys, tmp_path):
        data = tmp_path / "train.csv"
        run(capsys, "gen-data", str(data), "--per-class", "15", "--seed", "2")
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("population_size = 20\ngenerations = 3\nseed = 1\n")
        _, out1, _ = run(capsys, "train", str(data), "--config", str(cfg))
        _, out2, _ = run(capsys, "train", str(data), "--config", str(cfg), "--seed", "1")
        assert out1 == out2  # same seed spelled two ways

    def test_bad_config_exit(self, capsys, tmp_path):
        data = tmp_path / "train.csv"
        run(capsys, "gen-data", str(data), "--per-class", "10", "--seed", "2")
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("wat = 7\n")
        code, _, _ = run(capsys, "train", str(data), "--config", str(cfg))
        assert code == 2

    def test_classify_width_mismatch(self, capsys, tmp_path):
        clf = tmp_path / "clf.txt"
        clf.write_text("Z\n(diff s0 s9)\n")
        data = tmp_path / "d.csv"
        data.write_text("label,ch0,ch1\n1,0.0,1.0\n")
        code, _, _ = run(capsys, "classify", str(clf), str(data))
        assert code == 3

    def test_classify_malformed_classifier(self, capsys, tmp_path):
        clf = tmp_path / "clf.txt"
        clf.write_text("Q\n(diff s0 s1)\n")
        data = tmp_path / "d.csv"
        data.write_text("label,ch0,ch1\n1,0.0,1.0\n")
        code, _, _ = run(capsys, "classify", str(clf), str(data))
        assert code == 2


class TestCheck:
    def test_circuit_suite_passes(self, capsys):
        code, out, _ = run(capsys, "check", "circuits")
        assert code == 0
        assert "FAIL" not in out

    def test_unknown_suite(self, capsys):
        code, _, err = run(capsys, "check", "bogus")
        assert code == 2
        assert "unknown suite" in err

    def test_means_suite_reports_strict_limit_check(self, capsys):
        # the one deliberately strict tolerance: the +/-40 exponent check
        # asks for 1e-6 agreement with min/max, but the defining formula
        # pins those means ln(n)/40 away, so this suite honestly fails
        code, out, _ = run(capsys, "check", "means")
        assert code == 1
        failing = [line for line in out.splitlines() if line.startswith("FAIL")]
        assert len(failing) == 1
        assert "+/-40" in failing[0]


class TestUsage:
    def test_no_arguments_is_usage_error(self, capsys):
        assert run(capsys, )[0] == 2

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2
