"""CSV and JSON renderings of experiment results.

Both start with the tool version and echo the effective config, so a result
file is enough to reproduce itself. Floats are written with repr precision;
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from chebylab import __version__
from chebylab.experiments import ExperimentConfig, ExperimentResult

SCHEMA_VERSION = 1


def _cell(value: object) -> object:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return value


def _json_value(value: object) -> object:
    # NaN is not valid JSON.
    if isinstance(value, float) and value != value:
        return None
    return value


def render_csv(config: ExperimentConfig, result: ExperimentResult) -> str:
    """Header block of '#' lines, then a CSV table."""
    buffer = io.StringIO()
    buffer.write(f"# chebylab {__version__} schema={SCHEMA_VERSION}\n")
    for key, value in config.echo():
        buffer.write(f"# config {key} = {value}\n")
    for name, value in result.constants.items():
        buffer.write(f"# {name} = {_cell(value)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def render_json(config: ExperimentConfig, result: ExperimentResult) -> str:
    """One JSON object with sorted keys."""
    document = {
        "version": __version__,
        "schema": SCHEMA_VERSION,
        "config": [[key, value] for key, value in config.echo()],
        "constants": {name: _json_value(value) for name, value in result.constants.items()},
        "columns": list(result.columns),
        "rows": [[_json_value(value) for value in row] for row in result.rows],
    }
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def render(config: ExperimentConfig, result: ExperimentResult, fmt: str) -> str:
    return render_json(config, result) if fmt == "json" else render_csv(config, result)


def write_result(text: str, path: Path) -> None:
    """Write a rendered result, creating parent directories."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
