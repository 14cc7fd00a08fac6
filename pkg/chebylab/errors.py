"""Error hierarchy shared by the numerical modules and the CLI.

Every error names the module and operation it came from so the CLI can emit
a machine-readable record without parsing messages.
"""

from __future__ import annotations

from dataclasses import dataclass


class ChebylabError(Exception):
    """Base class for all chebylab failures.

    Attributes:
        module: Short module name, e.g. 'potential'.
        operation: Operation that failed, e.g. 'solve_equilibrium'.
    """

    module = "chebylab"

    def __init__(self, message: str, operation: str = "") -> None:
        super().__init__(message)
        self.operation = operation

    @property
    def origin(self) -> str:
        """Dotted '<module>.<operation>' label used in console messages."""
        return f"{self.module}.{self.operation}" if self.operation else self.module

    def record(self) -> dict[str, object]:
        """Build the machine-readable error record written by the CLI."""
        return {
            "module": self.module,
            "operation": self.operation,
            "type": type(self).__name__,
            "message": str(self),
        }


class GeometryError(ChebylabError):
    """Invalid component parameters, invalid systems or too-coarse grids."""

    module = "geometry"


class PotentialError(ChebylabError):
    """Degenerate collocation systems and undefined Green's evaluations."""

    module = "potential"


class EllipticError(ChebylabError):
    """Out-of-range inputs to the special functions."""

    module = "elliptic"


class ChebyshevError(ChebylabError):
    """Minimax solver refusals and failures."""

    module = "chebyshev"


class AsymptoticsError(ChebylabError):
    """Systems outside the hypotheses of an asymptotic prediction."""

    module = "asymptotics"


@dataclass(frozen=True)
class ConfigIssue:
    """One located problem in an experiment config.

    Attributes:
        line: 1-based line number (0 when the issue is not tied to a line).
        message: Human-readable description.
    """

    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}" if self.line else self.message


class ConfigError(ChebylabError):
    """A config file that failed strict parsing.

    Attributes:
        issues: Every problem found, in line order.
    """

    module = "cli"

    def __init__(self, issues: list[ConfigIssue], operation: str = "parse_config") -> None:
        self.issues = sorted(issues, key=lambda issue: issue.line)
        super().__init__("; ".join(str(issue) for issue in self.issues), operation)

    def record(self) -> dict[str, object]:
        record = super().record()
        record["issues"] = [
            {"line": issue.line, "message": issue.message} for issue in self.issues
        ]
        return record
