"""Tests for the petz-verify command line."""

import csv
import io
import json

import pytest

from petz_geometry.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATIONS, build_parser, main, suite_config

QUICK = ["--dims", "2", "--kappas", "0.5", "--specs", "bh,bkm", "--trials", "2", "--seed", "3"]


class TestEval:
    """Test the eval subcommand."""

    def test_bkm_at_one(self, capsys):
        assert main(["eval", "--spec", "bkm", "--x", "1"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "1.0"

    def test_bures_helstrom(self, capsys):
        assert main(["eval", "--spec", "bh", "--x", "3"]) == EXIT_OK
        assert float(capsys.readouterr().out) == pytest.approx(2.0)

    def test_unknown_spec(self, capsys):
        assert main(["eval", "--spec", "gauss", "--x", "1"]) == EXIT_ERROR
        assert "error" in capsys.readouterr().err

    def test_domain_error(self):
        assert main(["eval", "--spec", "wy", "--x", "-1"]) == EXIT_ERROR

    def test_missing_argument(self):
        assert main(["eval", "--spec", "wy"]) == EXIT_ERROR

    def test_gradient(self, capsys):
        """grad of <z> at diag(0.7, 0.3) for BH."""
        state = json.dumps([[0.7, 0.0], [0.0, 0.3]])
        observable = json.dumps([[1.0, 0.0], [0.0, -1.0]])
        code = main(["eval", "--spec", "bh", "--state", state, "--observable", observable])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["kind"] == "tangent"
        assert payload["re"][0][0] == pytest.approx(0.7 - 0.4 * 0.7)
        assert payload["re"][1][1] == pytest.approx(-0.3 - 0.4 * 0.3)

    def test_gradient_from_file(self, tmp_path, capsys):
        path = tmp_path / "state.json"
        path.write_text(json.dumps({"dim": 2, "re": [[0.5, 0.0], [0.0, 0.5]]}))
        code = main(["eval", "--spec", "wy", "--state", f"@{path}", "--observable", "[[0, 1], [1, 0]]"])
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out)["dim"] == 2

    def test_unnormalized_state(self):
        code = main(["eval", "--spec", "bh", "--state", "[[1, 0], [0, 1]]", "--observable", "[[1, 0], [0, 1]]"])
        assert code == EXIT_ERROR


class TestSuites:
    """Test suite subcommands, exit codes and report output."""

    def test_passing_suite(self, capsys):
        assert main(["gradient", *QUICK]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["suite"] == "gradient"
        assert report["passed"] is True
        assert "wall_time_s" not in report

    def test_violations_exit_code(self, capsys):
        """Shrinking every tolerance to nothing turns finite-difference checks into violations."""
        assert main(["gradient", *QUICK, "--tol-scale", "1e-20"]) == EXIT_VIOLATIONS
        assert json.loads(capsys.readouterr().out)["violations"]

    def test_csv_output(self, capsys):
        assert main(["actions", *QUICK, "--format", "csv"]) == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert rows
        assert {row["suite"] for row in rows} == {"actions"}
        assert {row["passed"] for row in rows} == {"true"}

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "reports" / "metric.json"
        assert main(["metric", *QUICK, "--out", str(out)]) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["suite"] == "metric"

    def test_byte_identical_reruns(self, tmp_path):
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        main(["commutators", *QUICK, "--out", str(first)])
        main(["commutators", *QUICK, "--workers", "2", "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_report_omits_output_settings(self, tmp_path):
        out = tmp_path / "metric.json"
        main(["metric", *QUICK, "--workers", "3", "--out", str(out)])
        echoed = json.loads(out.read_text())["config"]
        assert not {"workers", "out", "format"} & set(echoed)
        assert echoed["seed"] == json.loads(out.read_text())["seed"]

    def test_unknown_command(self, capsys):
        assert main(["geodesics"]) == EXIT_ERROR
        assert "petz-verify" in capsys.readouterr().err

    def test_invalid_dimension(self):
        assert main(["metric", "--dims", "1"]) == EXIT_ERROR

    def test_invalid_spec_list(self):
        assert main(["metric", "--specs", "bh,test:square"]) == EXIT_ERROR


class TestSuiteConfig:
    """Test flag to SuiteConfig mapping."""

    def test_defaults(self):
        cfg = suite_config(build_parser().parse_args(["metric"]))
        assert cfg.dims == [2, 3, 4]
        assert cfg.format == "json"

    def test_kappa_scan_flags(self):
        """--kappas sets the scan grid and --trials the witness budget."""
        args = build_parser().parse_args(["kappa-scan", "--kappas", "2,0.5", "--trials", "50"])
        cfg = suite_config(args)
        assert cfg.scan_kappas == [0.5, 2.0]
        assert cfg.witness_trials == 50

    def test_tol_scale(self):
        args = build_parser().parse_args(["gradient", "--tol-scale", "10"])
        assert suite_config(args).tolerances.numeric == pytest.approx(1e-5)
