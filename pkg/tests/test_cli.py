import contextlib
import io
import json

import pytest

from superframe.cli import main


def run_cli(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run_cli(*argv)
    return code, json.loads(text)


class TestAdmissible:
    def test_admissible_pair(self):
        code, report = run_json("admissible", "--M", "2", "--P", "3")
        assert code == 0
        assert report["schema"] == "superframe-report/1"
        assert report["result"]["admissible"] is True
        assert report["result"]["p"] == 3

    def test_inadmissible_pair(self):
        code, report = run_json("admissible", "--M", "2", "--P", "2")
        assert code == 3
        assert report["result"]["admissible"] is False

    def test_singular_input(self, capsys):
        code, _ = run_cli("admissible", "--M", "0", "--P", "3")
        assert code == 1

    def test_quincunx(self):
        code, report = run_json("admissible", "--M", "1,1;1,-1", "--P", "3,0;0,3")
        assert code == 0
        assert report["result"]["p"] == 9

    def test_default_oversampling_is_identity(self):
        code, report = run_json("admissible", "--M", "1,1;1,-1")
        assert code == 0
        assert report["result"]["p"] == 1


class TestCosets:
    def test_fields(self):
        code, report = run_json("cosets", "--M", "2", "--P", "3")
        assert code == 0
        res = report["result"]
        assert res["theta"] == ["0", "1/3", "2/3"]
        assert res["sigma"] == [0, 2, 1]
        assert res["sigma_star"] == [0, 2, 1]
        assert res["h_unitarity_residual"] <= 1e-12

    def test_trivial_oversampling(self):
        code, report = run_json("cosets", "--M", "2", "--P", "1")
        assert code == 0
        assert report["result"]["theta"] == ["0"]

    def test_not_admissible_exit(self):
        code, _ = run_cli("cosets", "--M", "2", "--P", "2")
        assert code == 3


class TestVerify:
    def test_factorization_suite(self):
        code, report = run_json(
            "verify", "--suite", "lemma3", "--M", "2", "--P", "3",
            "--f", "haar", "--g", "chi:0,1", "--jmax", "3", "--kmax", "6",
        )
        assert code == 0
        assert report["result"]["pass"] is True
        assert report["result"]["max_residual"] <= 1e-10

    def test_projection_suite(self):
        code, report = run_json(
            "verify", "--suite", "projection", "--M", "2", "--P", "3",
            "--wavelet", "haar", "--jmax", "2", "--kmax", "4",
        )
        assert code == 0
        assert report["result"]["pass"] is True

    def test_gate_on_admissibility(self):
        code, _ = run_cli("verify", "--suite", "operators", "--M", "2", "--P", "2")
        assert code == 3

    def test_unknown_suite_is_input_error(self):
        code, _ = run_cli("verify", "--suite", "nonsense")
        assert code == 1

    def test_nonpositive_tolerance_is_input_error(self):
        code, _ = run_cli("verify", "--suite", "lemma3", "--tol", "-1e-9")
        assert code == 1

    def test_residual_violation_exits_four(self):
        code, report = run_json(
            "verify", "--suite", "lemma3", "--M", "2", "--P", "3",
            "--jmax", "2", "--kmax", "4", "--tol", "1e-20",
        )
        assert code == 4
        assert report["result"]["pass"] is False
        assert report["result"]["worst"] is not None

    @pytest.mark.parametrize(
        "suite", ["operators", "lemma2", "eqeg", "theorem1-onb", "corollary"]
    )
    def test_all_suites_pass_small(self, suite):
        code, report = run_json(
            "verify", "--suite", suite, "--M", "2", "--P", "3",
            "--jmax", "2", "--kmax", "4",
        )
        assert code == 0, report
        assert report["result"]["pass"] is True


class TestFrameSum:
    def test_truncated_parseval_value(self):
        code, report = run_json(
            "framesum", "--system", "base", "--wavelet", "haar", "--f", "chi:0,1",
            "--jmin", "-8", "--jmax", "8", "--kmax", "16",
        )
        assert code == 0
        assert report["result"]["value"] == pytest.approx(0.99609375, abs=1e-10)

    def test_zero_function(self):
        code, report = run_json("framesum", "--f", "zero", "--jmin", "-2", "--jmax", "2", "--kmax", "2")
        assert code == 0
        assert report["result"]["value"] == 0.0

    def test_super_system(self):
        code, report = run_json(
            "framesum", "--system", "super", "--M", "2", "--P", "3",
            "--wavelet", "haar", "--f", "chi:0,1", "--jmin", "-6", "--jmax", "6",
        )
        assert code == 0
        assert report["result"]["value"] == pytest.approx(1 - 2**-6, abs=1e-10)


class TestGram:
    def test_super_identity_stats(self):
        code, report = run_json(
            "gram", "--system", "super", "--M", "2", "--P", "3", "--wavelet", "haar",
            "--jmin", "-3", "--jmax", "3", "--kmax", "8",
        )
        assert code == 0
        stats = report["result"]["stats"]
        assert stats["max_off_diagonal"] <= 1e-10
        assert stats["max_diagonal_deviation"] <= 1e-10

    def test_size_limit_exit(self):
        code, _ = run_cli(
            "gram", "--M", "2", "--P", "3", "--jmin", "-3", "--jmax", "3",
            "--kmax", "8", "--limit", "5",
        )
        assert code == 2

    def test_csv_dump(self):
        code, text = run_cli(
            "gram", "--M", "2", "--P", "3", "--jmin", "0", "--jmax", "0",
            "--kmax", "1", "--format", "csv",
        )
        assert code == 0
        rows = text.strip().splitlines()
        assert len(rows) == 3  # three elements at j=0, k in {-1,0,1}
        first = rows[0].split(",")
        assert len(first) == 6  # re/im pairs of three entries
        assert float(first[0]) == pytest.approx(1.0, abs=1e-12)


class TestOutputHandling:
    def test_pretty_is_rendering_of_json(self):
        code, text = run_cli("admissible", "--M", "2", "--P", "3", "--format", "pretty")
        assert code == 0
        assert "admissible: true" in text
        assert "schema: \"superframe-report/1\"" in text

    def test_out_file(self, tmp_path):
        path = tmp_path / "report.json"
        code, text = run_cli("admissible", "--M", "2", "--P", "3", "--out", str(path))
        assert code == 0
        assert text == ""
        assert json.loads(path.read_text())["result"]["admissible"] is True


class TestDeterminism:
    def test_repeat_runs_byte_identical(self):
        args = (
            "cosets", "--M", "2", "--P", "3",
        )
        _, first = run_cli(*args)
        _, second = run_cli(*args)
        assert first == second

    def test_worker_count_does_not_change_bytes(self, monkeypatch):
        args = (
            "gram", "--system", "super", "--M", "2", "--P", "3", "--wavelet", "haar",
            "--jmin", "-2", "--jmax", "2", "--kmax", "4",
        )
        monkeypatch.setenv("SUPERFRAME_THREADS", "1")
        _, one = run_cli(*args)
        monkeypatch.setenv("SUPERFRAME_THREADS", "7")
        _, seven = run_cli(*args)
        monkeypatch.delenv("SUPERFRAME_THREADS")
        _, default = run_cli(*args)
        assert one == seven == default
