"""CLI interface for chebylab using Typer."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import typer
from rich.markup import escape
from rich.table import Table

from chebylab.config import default_jobs
from chebylab.errors import ChebylabError, ConfigError, ConfigIssue
from chebylab.experiments import FORMATS, ExperimentConfig, load_config, run_experiment
from chebylab.geometry import validate_system
from chebylab.output import render, write_result
from chebylab.utils import configure_logging, console, err_console

app = typer.Typer(
    name="chebylab",
    help="Chebyshev numbers, potential theory and theta-function asymptotics on compact sets.",
    add_completion=False,
    context_settings={"help_option_names": ["-h", "--help"]},
)


def _fail(exc: ChebylabError) -> None:
    """Report a chebylab error and exit 1.

    Raises:
        typer.Exit: Always, with status 1.
    """
    err_console.print(f"[red]Error:[/] {exc.origin}: {escape(str(exc))}")
    typer.echo(json.dumps(exc.record(), sort_keys=True), err=True)
    raise typer.Exit(1)


@app.command()
def run(
    config_path: Path = typer.Argument(..., metavar="CONFIG", help="Experiment config file."),
    output: Optional[Path] = typer.Option(
        None, "--output", "-o", help="Write results here instead of the config's output or stdout."
    ),
    fmt: Optional[str] = typer.Option(
        None, "--format", "-f", help="Output format: csv or json. Overrides the config."
    ),
    jobs: Optional[int] = typer.Option(
        None,
        "--jobs",
        "-j",
        min=1,
        help="Parallel degree solves for sweeps. Defaults to $CHEBYLAB_JOBS or 1.",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log solver progress."),
) -> None:
    """Run the experiment described by CONFIG.

    \b
    Examples:
        chebylab run interval.cfg                  # CSV to stdout
        chebylab run elliptic.cfg -o out.csv -j 4  # Parallel degree sweep
        chebylab run sweep.cfg --format json
    """
    configure_logging(verbose)
    try:
        if fmt is not None and fmt not in FORMATS:
            issue = ConfigIssue(0, f"--format must be one of {', '.join(FORMATS)}, got {fmt!r}")
            raise ConfigError([issue], operation="run")
        config = load_config(config_path)
        result = run_experiment(config, jobs or default_jobs())
    except ChebylabError as exc:
        _fail(exc)
        return  # pragma: no cover

    text = render(config, result, fmt or config.format)
    destination = output or config.output
    if destination is None:
        typer.echo(text, nl=False)
    else:
        write_result(text, destination)
        err_console.print(f"[green]Wrote[/] {escape(str(destination))}")


def _summary(config: ExperimentConfig) -> bool:
    """Print the system summary table; return whether the system is valid."""
    report = validate_system(config.system)
    table = Table(title=f"{config.experiment} · {len(config.components)} components")
    table.add_column("#", justify="right")
    table.add_column("component")
    table.add_column("kind")
    for index, component in enumerate(config.components, start=1):
        table.add_row(str(index), component.describe(), component.kind.value)
    console.print(table)
    if report.gaps:
        gaps = ", ".join(f"({a:g}, {b:g})" for a, b in report.gaps)
        console.print(f"gaps: {gaps}")
    if report.valid:
        console.print("[green]valid[/]")
    else:
        for violation in report.violations:
            console.print(f"[red]invalid:[/] {escape(violation)}")
    return report.valid


@app.command()
def validate(
    config_path: Path = typer.Argument(..., metavar="CONFIG", help="Experiment config file."),
) -> None:
    """Parse CONFIG and validate its system without solving anything."""
    configure_logging()
    try:
        config = load_config(config_path)
    except ChebylabError as exc:
        _fail(exc)
        return  # pragma: no cover
    if not _summary(config):
        raise typer.Exit(1)
