"""Pytest fixtures for chebylab tests."""

from __future__ import annotations

from pathlib import Path

import pytest

from chebylab.geometry import Circle, CompactSystem, Interval


@pytest.fixture(autouse=True)
def _hermetic_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep runs independent of the caller's CHEBYLAB_* overrides."""
    monkeypatch.delenv("CHEBYLAB_LOG_LEVEL", raising=False)
    monkeypatch.delenv("CHEBYLAB_JOBS", raising=False)


@pytest.fixture
def unit_interval() -> CompactSystem:
    """E = [−1, 1]."""
    return CompactSystem((Interval(-1.0, 1.0),))


@pytest.fixture
def unit_circle() -> CompactSystem:
    """E = {|z| = 1}."""
    return CompactSystem((Circle(0.0, 1.0),))


@pytest.fixture
def two_intervals() -> CompactSystem:
    """E = [−1, −0.5] ∪ [0.5, 1]."""
    return CompactSystem((Interval(-1.0, -0.5), Interval(0.5, 1.0)))


@pytest.fixture
def elliptic_system() -> CompactSystem:
    """E = [−1, −0.2] ∪ circle(1, 0.3), the interval-plus-curve test set."""
    return CompactSystem((Interval(-1.0, -0.2), Circle(1.0, 0.3)))


@pytest.fixture
def write_config(tmp_path: Path):
    """Write config text to a file and return its path."""

    def _write(text: str, name: str = "experiment.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write
