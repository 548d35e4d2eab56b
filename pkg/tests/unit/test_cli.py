"""Tests for the command line interface."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from firstint import __version__
from firstint.cli.main import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_SOLVABILITY,
    cli,
    exit_code,
    run_cli,
)
from firstint.utils.exceptions import (
    ConfigurationError,
    FirstIntegralError,
    InputError,
    SolvabilityError,
    VerificationError,
)


@pytest.fixture
def runner() -> CliRunner:
    """Click test runner."""
    return CliRunner()


class TestCommands:
    """Tests for analyze, verify and emit."""

    def test_version(self, runner: CliRunner) -> None:
        """The package version is reported."""
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_emit_trivial(self, runner: CliRunner, specs_dir: Path) -> None:
        """The scalar system dx = 0 has x itself as integral."""
        result = runner.invoke(cli, ["emit", str(specs_dir / "trivial_1.json")])
        assert result.exit_code == EXIT_OK
        assert result.stdout == "lin([1])\n"

    def test_analyze_summary(self, runner: CliRunner, specs_dir: Path) -> None:
        """The summary lists ranks and the selected integrals."""
        result = runner.invoke(cli, ["analyze", str(specs_dir / "sys_3_2.json")])
        assert result.exit_code == EXIT_OK
        assert "Completely solvable: yes" in result.stdout
        assert "Autonomous rank: 3/3, total rank: 4/4" in result.stdout
        assert "lin([1,-1,1,-1])" in result.stdout

    def test_analyze_writes_report(
        self, runner: CliRunner, specs_dir: Path, tmp_path: Path
    ) -> None:
        """--out writes the JSON report."""
        out = tmp_path / "reports" / "sys_3_2.json"
        result = runner.invoke(
            cli, ["analyze", str(specs_dir / "sys_3_2.json"), "--out", str(out), "--seed", "3"]
        )
        assert result.exit_code == EXIT_OK
        report = json.loads(out.read_text())
        assert report["schema_version"] == "1.0"
        assert report["config"]["seed"] == 3
        assert len(report["integrals"]) == 4

    def test_non_solvable_analysis(self, runner: CliRunner, specs_dir: Path) -> None:
        """Analysis reports the verdict without failing."""
        result = runner.invoke(cli, ["analyze", str(specs_dir / "sys_2_38.json")])
        assert result.exit_code == EXIT_OK
        assert "Completely solvable: no" in result.stdout

    def test_require_solvable(self, runner: CliRunner, specs_dir: Path) -> None:
        """The flag turns the verdict into exit code 3."""
        result = runner.invoke(
            cli, ["analyze", str(specs_dir / "sys_2_38.json"), "--require-solvable"]
        )
        assert result.exit_code == EXIT_SOLVABILITY

    def test_verify_non_solvable(self, runner: CliRunner, specs_dir: Path) -> None:
        """Verification needs a completely solvable system."""
        result = runner.invoke(cli, ["verify", str(specs_dir / "sys_2_38.json")])
        assert result.exit_code == EXIT_SOLVABILITY
        error = json.loads(result.stderr.strip().splitlines()[-1])
        assert error["error"] == "SolvabilityError"
        assert error["verdict"]["offending_pair"] == [0, 1]

    def test_verify_passes(self, runner: CliRunner, specs_dir: Path) -> None:
        """A diagonalizable ODE verifies."""
        result = runner.invoke(
            cli, ["verify", str(specs_dir / "sys_3_2.json"), "--trajectories", "3"]
        )
        assert result.exit_code == EXIT_OK
        assert "Verification: passed" in result.stdout

    def test_missing_file(self, runner: CliRunner, tmp_path: Path) -> None:
        """Unreadable documents exit with code 2."""
        result = runner.invoke(cli, ["analyze", str(tmp_path / "missing.json")])
        assert result.exit_code == EXIT_INPUT
        error = json.loads(result.stderr.strip().splitlines()[-1])
        assert error["error"] == "ConfigurationError"

    def test_invalid_document(self, runner: CliRunner, tmp_path: Path) -> None:
        """Validation errors carry their pointer."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"kind": "ode", "n": 0, "matrices": [[[0]]]}))
        result = runner.invoke(cli, ["emit", str(path)])
        assert result.exit_code == EXIT_INPUT
        error = json.loads(result.stderr.strip().splitlines()[-1])
        assert error["pointer"] == "/n"

    def test_invalid_option(self, runner: CliRunner, specs_dir: Path) -> None:
        """Out-of-range options are usage errors."""
        result = runner.invoke(cli, ["analyze", str(specs_dir / "sys_3_2.json"), "--tol", "-1"])
        assert result.exit_code == EXIT_INPUT


class TestRunCli:
    """Tests for the programmatic entry point."""

    def test_success(self, specs_dir: Path) -> None:
        """Successful runs return 0."""
        assert run_cli(["emit", str(specs_dir / "trivial_1.json")]) == EXIT_OK

    def test_solvability_failure(self, specs_dir: Path) -> None:
        """Error exit codes are returned, not raised."""
        assert run_cli(["verify", str(specs_dir / "sys_2_38.json")]) == EXIT_SOLVABILITY

    def test_missing_file(self, tmp_path: Path) -> None:
        """Input problems return 2."""
        assert run_cli(["analyze", str(tmp_path / "missing.json")]) == EXIT_INPUT

    @pytest.mark.parametrize(
        ("error", "code"),
        [
            (InputError("bad"), 2),
            (ConfigurationError("bad"), 2),
            (SolvabilityError("bad"), 3),
            (VerificationError("bad"), 4),
            (FirstIntegralError("bad"), 1),
        ],
    )
    def test_exit_codes(self, error: FirstIntegralError, code: int) -> None:
        """Each error family maps to its exit code."""
        assert exit_code(error) == code
