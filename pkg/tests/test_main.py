"""Tests for the command-line entry point."""

from unittest.mock import patch

import pytest

from src.core.errors import NotConverged, OutputError, SegmentNotOnGrid, ValidationError
from src.main import EXIT_CONFIG, EXIT_OK, EXIT_OUTPUT, EXIT_SOLVER, build_parser, main
from src.services.solver import SolveReport


class TestParser:
    """Test cases for argument parsing."""

    def test_run_arguments(self):
        """Test repeated --beta flags collect into a list."""
        argv = ["run", "--example", "3", "--beta", "-200", "--beta", "200"]
        args = build_parser().parse_args(argv + ["--refine", "4"])
        assert args.command == "run"
        assert args.example == "3"
        assert args.beta == [-200.0, 200.0]
        assert args.refine == 4

    def test_example_and_config_exclusive(self):
        """Test --example and --config cannot be combined."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["run", "--example", "2", "--config", "run.ini"])

    def test_unknown_example(self):
        """Test unknown example ids are rejected by the parser."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["run", "--example", "9"])

    def test_sweep_workers(self):
        """Test sweep accepts a worker count."""
        assert build_parser().parse_args(["sweep", "--workers", "2"]).workers == 2


class TestMain:
    """Test cases for exit codes."""

    def test_converge_ok(self, tmp_path):
        """Test the convergence study writes into --out and exits 0."""
        with patch("src.main.convergence_study", return_value=[]) as study:
            code = main(["converge", "--cycles", "2", "--out", str(tmp_path)])
        assert code == EXIT_OK
        study.assert_called_once_with(2, output_path=tmp_path / "convergence.csv")

    def test_run_ok(self, tmp_path):
        """Test a run passes the overrides to the sweep and exits 0."""
        with patch("src.main.run_sweep", return_value=[]) as sweep:
            code = main(
                [
                    "run",
                    "--example",
                    "1b",
                    "--beta",
                    "50",
                    "--refine",
                    "2",
                    "--out",
                    str(tmp_path),
                ]
            )
        assert code == EXIT_OK
        config = sweep.call_args.args[0]
        assert config.problem.name == "1b"
        assert config.betas == (50.0,)
        assert config.refinements == 2
        assert sweep.call_args.kwargs["max_workers"] == 1

    def test_missing_config_file(self, tmp_path):
        """Test an unreadable configuration is an IO failure and exits 4."""
        assert main(["run", "--config", str(tmp_path / "missing.ini")]) == EXIT_OUTPUT

    def test_unrefined_mesh_rejected(self):
        """Test --refine 0 exits 2 before any solve; y = 0.5 is no grid line."""
        with patch("src.main.run_sweep") as sweep:
            assert main(["run", "--example", "1a", "--refine", "0"]) == EXIT_CONFIG
        sweep.assert_not_called()

    def test_repeated_beta_rejected(self):
        """Test a beta given twice exits 2."""
        with patch("src.main.run_sweep") as sweep:
            code = main(["run", "--example", "1a", "--beta", "50", "--beta", "50.0"])
        assert code == EXIT_CONFIG
        sweep.assert_not_called()

    def test_invalid_config(self, tmp_path):
        """Test a validation error exits 2."""
        path = tmp_path / "run.ini"
        path.write_text("[material]\nnu = 0.5\n")
        assert main(["run", "--config", str(path)]) == EXIT_CONFIG

    def test_config_error_from_sweep(self):
        """Test configuration errors raised while running exit 2."""
        with patch("src.main.run_sweep", side_effect=ValidationError("beta", "bad")):
            assert main(["sweep"]) == EXIT_CONFIG

    def test_solver_failure(self):
        """Test a Newton failure exits 3."""
        report = SolveReport(False, 50, [1.0, 0.5], [1.0])
        with patch("src.main.run_sweep", side_effect=NotConverged(report)):
            assert main(["run", "--example", "2"]) == EXIT_SOLVER

    def test_geometry_failure(self):
        """Test other solver-package errors exit 3."""
        with patch("src.main.run_sweep", side_effect=SegmentNotOnGrid("off grid")):
            assert main(["sweep", "--example", "3"]) == EXIT_SOLVER

    def test_output_failure(self):
        """Test a write failure exits 4."""
        with patch("src.main.run_sweep", side_effect=OutputError("disk full")):
            assert main(["run"]) == EXIT_OUTPUT
