"""CLI entry point for the firstint command."""

import json
import sys
from collections.abc import Callable, Sequence
from typing import Any

import click
from pydantic import ValidationError

from firstint import __version__
from firstint.core.config import AnalysisConfig
from firstint.core.engine import AnalysisEngine, AnalysisResult
from firstint.systems.spec import SystemSpec
from firstint.utils.config import get_settings
from firstint.utils.exceptions import (
    ConfigurationError,
    FirstIntegralError,
    InputError,
    SolvabilityError,
    VerificationError,
)
from firstint.utils.logger import configure_logging, get_logger, level_for

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_SOLVABILITY = 3
EXIT_VERIFICATION = 4


def exit_code(error: FirstIntegralError) -> int:
    """Process exit code for an error."""
    match error:
        case InputError() | ConfigurationError():
            return EXIT_INPUT
        case SolvabilityError():
            return EXIT_SOLVABILITY
        case VerificationError():
            return EXIT_VERIFICATION
    return EXIT_FAILURE


def _report_error(error: FirstIntegralError) -> int:
    payload: dict[str, Any] = {"error": type(error).__name__, "message": str(error)}
    payload.update(error.context())
    click.echo(json.dumps(payload, default=str), err=True)
    return exit_code(error)


def _analysis_options(func: Callable[..., Any]) -> Callable[..., Any]:
    options = [
        click.argument("spec_file", type=click.Path(dir_okay=False)),
        click.option("--out", "-o", type=click.Path(dir_okay=False), help="Report output path"),
        click.option(
            "--tol", type=click.FloatRange(min=0, min_open=True), help="Relative tolerance"
        ),
        click.option(
            "--trajectories", type=click.IntRange(min=0), help="Trajectories for verification"
        ),
        click.option("--step", type=click.FloatRange(min=0, min_open=True), help="RK4 step"),
        click.option("--seed", type=click.IntRange(min=0), help="Random seed"),
        click.option("--exhaustive", is_flag=True, help="Try every minimal factor subset"),
        click.option(
            "--require-solvable", is_flag=True, help="Fail with exit code 3 if not solvable"
        ),
        click.option("--verbose", "-v", count=True, help="-v for info, -vv for debug logs"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _setup(verbose: int) -> None:
    settings = get_settings()
    configure_logging(level_for(verbose, settings.log_level), settings.json_logs)


def _engine(flags: dict[str, Any]) -> AnalysisEngine:
    chosen = {k: v for k, v in flags.items() if v is not None and v is not False}
    try:
        config = AnalysisConfig(**chosen)
    except ValidationError as e:
        raise InputError(f"Invalid option: {e.errors()[0]['msg']}") from e
    return AnalysisEngine(config)


def _summary(result: AnalysisResult) -> None:
    spec = result.spec
    click.echo(f"System: {spec.name or 'unnamed'} ({spec.kind.value}, n={spec.n}, m={spec.m})")
    click.echo(f"Completely solvable: {'yes' if result.verdict.solvable else 'no'}")
    if result.general is not None:
        g = result.general
        click.echo(
            f"Autonomous rank: {g.autonomous_rank}/{g.autonomous_target}, "
            f"total rank: {g.total_rank}/{g.total_target}"
        )
    for f in result.integrals:
        kind = "autonomous" if f.autonomous else "nonautonomous"
        click.echo(f"  [{f.theorem_tag.value}, {kind}] {f.rendered}")
    if result.verification is not None:
        click.echo(f"Verification: {'passed' if result.verification.passed else 'FAILED'}")
    for note in result.notes:
        click.echo(f"  note: {note}")


def _run(
    command: str, spec_file: str, out: str | None, verbose: int, flags: dict[str, Any]
) -> None:
    _setup(verbose)
    ctx = click.get_current_context()
    try:
        spec = SystemSpec.from_file(spec_file)
        engine = _engine(flags)
        if command == "verify":
            result = engine.verify(spec)
        else:
            result = engine.analyze(spec)
        if out:
            result.save(out)
        if command == "emit":
            for text in result.expressions():
                click.echo(text)
            return
        _summary(result)
        verification = result.verification
        if verification is not None and not verification.passed:
            raise VerificationError(
                "Integrals failed verification",
                failures=[{"item": item} for item in verification.failures],
            )
    except FirstIntegralError as e:
        ctx.exit(_report_error(e))


@click.group()
@click.version_option(version=__version__)
def cli() -> None:
    """firstint - first integrals of linear differential systems."""
    pass


@cli.command()
@_analysis_options
def analyze(spec_file: str, out: str | None, verbose: int, **flags: Any) -> None:
    """Construct a general integral and print a summary."""
    _run("analyze", spec_file, out, verbose, flags)


@cli.command()
@_analysis_options
def verify(spec_file: str, out: str | None, verbose: int, **flags: Any) -> None:
    """Construct a general integral and verify it numerically."""
    _run("verify", spec_file, out, verbose, flags)


@cli.command()
@_analysis_options
def emit(spec_file: str, out: str | None, verbose: int, **flags: Any) -> None:
    """Print the selected integrals in the expression grammar, one per line."""
    _run("emit", spec_file, out, verbose, flags)


def run_cli(argv: Sequence[str] | None = None) -> int:
    """
    Run the command line and return the exit code instead of exiting.

    Example:
        >>> run_cli(["emit", "specs/sys_3_2.json"])
        0
    """
    try:
        # without standalone mode, main() returns the code passed to ctx.exit
        rv = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.Exit as e:
        return int(e.exit_code)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        return EXIT_FAILURE
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run_cli())
