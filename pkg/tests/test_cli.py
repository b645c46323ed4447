"""End-to-end tests for the command-line interface (in-process)."""

import json

import numpy as np
import pytest

from funnystrom import experiments, metrics
from funnystrom.cli import format_approx_report, main
from funnystrom.errors import MatrixFileError, MismatchWithPaperError
from funnystrom.experiments import PINNED_5X5, ExperimentConfig
from funnystrom.functions import get_function
from funnystrom.linalg import NormKind, SpsdMatrix
from funnystrom.metrics import TheoremVerdict, evaluate_approximations
from funnystrom.mmio import read_matrix, write_matrix
from funnystrom.nystrom import funnystrom, nystrom_truncated
from funnystrom.sketch import SketchConfig, gaussian_basis


def parse_report_line(line):
    return dict(token.split("=", 1) for token in line.split())


@pytest.fixture
def diag_file(tmp_path):
    path = tmp_path / "diag.mtx"
    write_matrix(path, np.diag([3.0, 2.0, 1.0]))
    return str(path)


@pytest.fixture
def pinned_file(tmp_path):
    path = tmp_path / "pinned.mtx"
    write_matrix(path, PINNED_5X5)
    return str(path)


class TestApprox:
    def test_identity_basis_recovers_exactly(self, diag_file, capsys):
        code = main(["approx", diag_file, "--basis", "explicit-identity",
                     "--k", "3", "--function", "identity",
                     "--norms", "frobenius"])
        out = capsys.readouterr().out
        assert code == 0
        norm_line = [l for l in out.splitlines() if l.startswith("norm=")][0]
        fields = parse_report_line(norm_line)
        assert fields["eps_projection"] == "0"
        assert fields["eps_nystrom"] == "0"
        assert fields["eps_funnystrom"] == "0"
        assert fields["degenerate"] == "true"
        head = parse_report_line(out.splitlines()[0])
        assert head["scheme"] == "explicit" and head["k_eff"] == "3"

    def test_pinned_matrix_operator_constants(self, pinned_file, capsys):
        code = main(["approx", pinned_file, "--basis", "explicit(e1..e3)",
                     "--k", "2", "--function", "identity",
                     "--norms", "operator"])
        out = capsys.readouterr().out
        assert code == 0
        line = [l for l in out.splitlines() if l.startswith("norm=operator")][0]
        fields = parse_report_line(line)
        np.testing.assert_allclose(float(fields["eps_projection"]),
                                   2.5900922073773813e-08, rtol=1e-6)
        np.testing.assert_allclose(float(fields["eps_nystrom"]),
                                   0.0057485758700788203, rtol=1e-6)

    def test_output_matches_library_rendering(self, diag_file, tmp_path, capsys):
        argv = ["approx", diag_file, "--basis", "gaussian", "--k", "2",
                "--ell", "2", "--seed", "11", "--function", "sqrt",
                "--norms", "nuclear,eigenvalue"]
        assert main(argv) == 0
        cli_text = capsys.readouterr().out

        a = read_matrix(diag_file)
        basis = gaussian_basis(a, SketchConfig(k=2, ell=2, seed=11))
        f = get_function("sqrt")
        factor = nystrom_truncated(a, basis, 2)
        lifted = funnystrom(factor, f)
        ev = evaluate_approximations(a, basis, 2, f)
        lib_text = format_approx_report(ev, factor, lifted,
                                        [NormKind.parse("nuclear")], True)
        assert cli_text == lib_text

        out_path = tmp_path / "report.txt"
        assert main(argv + ["--out", str(out_path)]) == 0
        assert out_path.read_text() == lib_text

    def test_explicit_column_list(self, pinned_file, capsys):
        code = main(["approx", pinned_file, "--basis", "explicit(e1,e4)",
                     "--k", "2", "--norms", "frobenius"])
        assert code == 0
        head = parse_report_line(capsys.readouterr().out.splitlines()[0])
        assert head["ell"] == "2"

    def test_randomized_scheme_requires_seed(self, diag_file, capsys):
        code = main(["approx", diag_file, "--basis", "gaussian", "--k", "2"])
        assert code == 2
        assert "--seed is required" in capsys.readouterr().err

    def test_bad_basis_specs(self, diag_file, capsys):
        assert main(["approx", diag_file, "--basis", "qr", "--k", "1"]) == 2
        assert main(["approx", diag_file, "--basis", "explicit(e0)",
                     "--k", "1"]) == 2
        assert main(["approx", diag_file, "--basis", "explicit(e9)",
                     "--k", "1"]) == 2
        capsys.readouterr()

    def test_missing_and_malformed_matrix_files(self, tmp_path, capsys):
        assert main(["approx", str(tmp_path / "nope.mtx"),
                     "--basis", "explicit-identity", "--k", "1"]) == 2
        bad = tmp_path / "bad.mtx"
        bad.write_text("this is not a matrix market file\n")
        assert main(["approx", str(bad), "--basis", "explicit-identity",
                     "--k", "1"]) == 2
        with pytest.raises(MatrixFileError):
            read_matrix(str(bad))
        capsys.readouterr()

    def test_asymmetric_matrix_rejected(self, tmp_path, capsys):
        path = tmp_path / "asym.mtx"
        write_matrix(path, np.array([[1.0, 2.0], [0.0, 1.0]]))
        assert main(["approx", str(path), "--basis", "explicit-identity",
                     "--k", "1"]) == 2
        assert "error:" in capsys.readouterr().err


class TestVerify:
    def test_theorem_suite_small(self, capsys):
        code = main(["verify", "--suite", "theorems", "--instances", "5",
                     "--seed", "7"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 13 * 5
        assert all(l.split(",")[1] == "true" for l in lines)
        assert all(l.startswith("T_") for l in lines)

    def test_instances_must_be_positive(self, capsys):
        assert main(["verify", "--instances", "0"]) == 2
        capsys.readouterr()

    def test_function_suite_reports_expected_flags(self, capsys):
        code = main(["verify", "--suite", "functions"])
        out = capsys.readouterr().out
        assert code == 0
        mono = [l for l in out.splitlines() if "clause=operator-monotone" in l]
        assert len(mono) == 7
        min1 = [l for l in mono if l.startswith("function=min1")][0]
        assert "passed=false" in min1 and "expected=false" in min1
        sqrt = [l for l in mono if l.startswith("function=sqrt")][0]
        assert "passed=true" in sqrt and "expected=true" in sqrt

    def test_remark_suite_informational_failures_do_not_gate(self, capsys):
        code = main(["verify", "--suite", "remarks", "--instances", "2"])
        out = capsys.readouterr().out
        assert code == 0
        assert len(out.strip().splitlines()) == 6 * 2

    def test_json_output(self, tmp_path, capsys):
        path = tmp_path / "verdicts.json"
        code = main(["verify", "--suite", "theorems", "--instances", "3",
                     "--json", str(path)])
        capsys.readouterr()
        assert code == 0
        decoded = json.loads(path.read_text())
        assert len(decoded) == 13 * 3
        assert all(d["holds"] for d in decoded)
        assert {d["theorem_id"] for d in decoded} == set(metrics.THEOREM_IDS)

    def test_failing_verdict_maps_to_exit_one(self, capsys, monkeypatch):
        bad = TheoremVerdict("T_demo", False, 2.0, 1.0, 1e-9, "digest")
        monkeypatch.setattr(metrics, "run_theorem_suite",
                            lambda *, instances, seed: [bad])
        assert main(["verify", "--suite", "theorems"]) == 1
        capsys.readouterr()


class TestExperiment:
    def test_config_file_round_trip(self, tmp_path, capsys):
        cfg = ExperimentConfig(
            generator="harmonic", n=20, scheme="gaussian", k=2,
            sweep_param="ell", sweep_values=(2, 3), function="sqrt",
            norms=("frobenius",), seed=4, repetitions=1)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(cfg.to_json())
        out_path = tmp_path / "rows.csv"
        code = main(["experiment", "--config", str(cfg_path),
                     "--out", str(out_path)])
        capsys.readouterr()
        assert code == 0
        assert out_path.read_text() == experiments.rows_to_csv(
            experiments.run_experiment(cfg))

    def test_bundled_figure_to_stdout(self, capsys):
        code = main(["experiment", "--figure", "fig1", "--scale", "desk"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == experiments.CSV_HEADER
        # 7 sweep widths x 4 metric families
        assert len(lines) == 1 + 7 * 4
        assert all(l.startswith("rpcholesky,200,10,") for l in lines[1:])

    def test_requires_config_or_figure(self, capsys):
        assert main(["experiment"]) == 2
        assert "--config" in capsys.readouterr().err

    def test_unreadable_config(self, tmp_path, capsys):
        assert main(["experiment", "--config", str(tmp_path / "none.json")]) == 2
        capsys.readouterr()


class TestCounterexamples:
    def test_sixteen_lines_exit_zero(self, capsys):
        code = main(["counterexamples"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 16
        assert all(l.startswith("pinned_") for l in lines)
        assert all(l.split(",")[1] == "true" for l in lines)

    def test_mismatch_maps_to_exit_one(self, capsys, monkeypatch):
        def boom(*, strict):
            raise MismatchWithPaperError("pinned value drifted")

        monkeypatch.setattr(experiments, "verify_counterexamples", boom)
        assert main(["counterexamples"]) == 1
        assert "verification failure" in capsys.readouterr().err

    def test_json_output(self, tmp_path, capsys):
        path = tmp_path / "pins.json"
        assert main(["counterexamples", "--json", str(path)]) == 0
        capsys.readouterr()
        decoded = json.loads(path.read_text())
        assert len(decoded) == 16


class TestThreadLimit:
    def test_invalid_thread_env(self, capsys, monkeypatch):
        monkeypatch.setenv("NYSTROM_THREADS", "abc")
        assert main(["counterexamples"]) == 2
        assert "NYSTROM_THREADS" in capsys.readouterr().err
        monkeypatch.setenv("NYSTROM_THREADS", "-1")
        assert main(["counterexamples"]) == 2
        capsys.readouterr()

    def test_thread_cap_applies_cleanly(self, capsys, monkeypatch):
        monkeypatch.setenv("NYSTROM_THREADS", "1")
        assert main(["counterexamples"]) == 0
        capsys.readouterr()
