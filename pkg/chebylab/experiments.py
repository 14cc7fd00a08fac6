"""Experiment configs and the pipelines behind `chebylab run`.

Config grammar: one ``key = value`` per line, ``#`` comments, optional
cosmetic ``[section]`` headers. Parsing is strict and collects every issue
with its line number before failing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from chebylab.asymptotics import (
    check_theorem1,
    compare_prediction,
    interval_bounds,
    widom_sweep,
)
from chebylab.config import (
    DEFAULT_DEGREE_MAX,
    DEFAULT_DEGREE_MIN,
    DEFAULT_DIRECTIONS,
    DEFAULT_NODES_PER_COMPONENT,
    DEFAULT_TAIL_START,
    MAX_DEGREE,
    MIN_DIRECTIONS,
    MIN_NODES_PER_COMPONENT,
)
from chebylab.errors import ConfigError, ConfigIssue
from chebylab.geometry import (
    Circle,
    CompactSystem,
    Component,
    Ellipse,
    Interval,
    discretize,
    require_valid,
)
from chebylab.potential import (
    EquilibriumSolution,
    condenser_modulus,
    greens_function,
    harmonic_measures,
    potential_deviation,
    solve_equilibrium,
)

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = (
    "capacity",
    "equilibrium",
    "green",
    "ratio_sweep",
    "elliptic_compare",
    "corollary_check",
)
SOLVERS = ("auto", "remez", "lp")
FORMATS = ("csv", "json")
SECTIONS = frozenset({"system", "experiment", "numerics", "output"})

# Grammar order; also the order config lines are echoed in outputs.
KEYS = (
    "component",
    "experiment",
    "nodes_per_component",
    "directions",
    "degree_min",
    "degree_max",
    "solver",
    "tail_start",
    "points",
    "output",
    "format",
    "seed",
)

# Finite-n ratios are checked against the limit-point interval with this slack.
CONTAINMENT_SLACK = 1e-2

# Shape name -> (constructor, parameter names).
_SHAPES: dict[str, tuple[Callable[..., Component], tuple[str, ...]]] = {
    "interval": (Interval, ("alpha", "beta")),
    "circle": (Circle, ("center", "radius")),
    "ellipse": (Ellipse, ("center", "semi_x", "semi_y")),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A parsed, range-checked experiment config.

    Attributes:
        components: The system's components, in file order.
        experiment: One of EXPERIMENT_KINDS.
        nodes_per_component: Boundary nodes per component.
        directions: LP direction count m.
        degree_min: First degree of sweeps.
        degree_max: Last degree of sweeps.
        solver: auto, remez or lp.
        tail_start: First degree of the asymptotic tail.
        points: Evaluation points for the green experiment.
        output: Output path, or None for stdout.
        format: csv or json.
        seed: Reserved; every algorithm is deterministic.
        component_text: Component values as written, for echoing.
    """

    components: tuple[Component, ...]
    experiment: str
    nodes_per_component: int = DEFAULT_NODES_PER_COMPONENT
    directions: int = DEFAULT_DIRECTIONS
    degree_min: int = DEFAULT_DEGREE_MIN
    degree_max: int = DEFAULT_DEGREE_MAX
    solver: str = "auto"
    tail_start: int = DEFAULT_TAIL_START
    points: tuple[complex, ...] = ()
    output: Path | None = None
    format: str = "csv"
    seed: int = 0
    component_text: tuple[str, ...] = ()

    @property
    def system(self) -> CompactSystem:
        return CompactSystem(self.components)

    @property
    def degrees(self) -> range:
        return range(self.degree_min, self.degree_max + 1)

    def echo(self) -> list[tuple[str, str]]:
        """Effective config as (key, value) pairs in grammar order."""
        pairs = [("component", text) for text in self.component_text]
        pairs += [
            ("experiment", self.experiment),
            ("nodes_per_component", str(self.nodes_per_component)),
            ("directions", str(self.directions)),
            ("degree_min", str(self.degree_min)),
            ("degree_max", str(self.degree_max)),
            ("solver", self.solver),
            ("tail_start", str(self.tail_start)),
        ]
        if self.points:
            pairs.append(("points", ", ".join(_format_point(z) for z in self.points)))
        if self.output is not None:
            pairs.append(("output", str(self.output)))
        pairs += [("format", self.format), ("seed", str(self.seed))]
        return pairs


def _format_point(z: complex) -> str:
    return repr(z.real) if z.imag == 0 else repr(z).strip("()")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _Parser:
    """Line-by-line parser that records issues instead of raising."""

    def __init__(self) -> None:
        self.issues: list[ConfigIssue] = []
        self.values: dict[str, tuple[int, str]] = {}
        self.components: list[tuple[int, str]] = []

    def issue(self, line: int, message: str) -> None:
        self.issues.append(ConfigIssue(line, message))

    def feed(self, number: int, raw: str) -> None:
        text = raw.split("#", 1)[0].strip()
        if not text:
            return
        if text.startswith("["):
            name = text[1:-1].strip() if text.endswith("]") else ""
            if name not in SECTIONS:
                self.issue(number, f"unknown section {text!r} (known: {', '.join(sorted(SECTIONS))})")
            return
        if "=" not in text:
            self.issue(number, f"expected 'key = value', got {text!r}")
            return
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in KEYS:
            self.issue(number, f"unknown key {key!r}")
        elif not value:
            self.issue(number, f"empty value for {key!r}")
        elif key == "component":
            self.components.append((number, value))
        elif key in self.values:
            self.issue(number, f"duplicate key {key!r} (first set on line {self.values[key][0]})")
        else:
            self.values[key] = (number, value)

    def integer(self, key: str, default: int, minimum: int | None = None) -> int:
        if key not in self.values:
            return default
        line, value = self.values[key]
        try:
            number = int(value)
        except ValueError:
            self.issue(line, f"{key} must be an integer, got {value!r}")
            return default
        if minimum is not None and number < minimum:
            self.issue(line, f"{key} must be at least {minimum}, got {number}")
        return number

    def choice(self, key: str, options: tuple[str, ...], default: str | None) -> str | None:
        if key not in self.values:
            return default
        line, value = self.values[key]
        if value not in options:
            self.issue(line, f"{key} must be one of {', '.join(options)}, got {value!r}")
            return default
        return value

    def component(self, line: int, value: str) -> Component | None:
        shape, *fields = value.split()
        if shape not in _SHAPES:
            self.issue(line, f"unknown component shape {shape!r} (interval, circle or ellipse)")
            return None
        factory, names = _SHAPES[shape]
        if len(fields) != len(names):
            self.issue(line, f"{shape} takes {len(names)} numbers ({' '.join(names)}), got {len(fields)}")
            return None
        numbers = []
        for name, token in zip(names, fields):
            try:
                number = float(token)
            except ValueError:
                number = float("nan")
            if not math.isfinite(number):
                self.issue(line, f"malformed number {token!r} for {shape} {name}")
                return None
            numbers.append(number)
        component = factory(*numbers)
        for problem in component.parameter_problems():
            self.issue(line, problem)
        return component

    def points(self) -> tuple[complex, ...]:
        if "points" not in self.values:
            return ()
        line, value = self.values["points"]
        parsed = []
        for token in value.split(","):
            try:
                z = complex(token.strip().replace(" ", ""))
            except ValueError:
                self.issue(line, f"malformed point {token.strip()!r}")
                continue
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                self.issue(line, f"point {token.strip()!r} is not finite")
                continue
            parsed.append(z)
        return tuple(parsed)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and range-check an experiment config.

    Args:
        text: Config file contents.

    Returns:
        The ExperimentConfig.

    Raises:
        ConfigError: Listing every located issue.
    """
    parser = _Parser()
    for number, raw in enumerate(text.splitlines(), start=1):
        parser.feed(number, raw)

    components = []
    for line, value in parser.components:
        component = parser.component(line, value)
        if component is not None:
            components.append(component)
    if not parser.components:
        parser.issue(0, "missing required key 'component'")

    experiment = parser.choice("experiment", EXPERIMENT_KINDS, None)
    if "experiment" not in parser.values:
        parser.issue(0, "missing required key 'experiment'")

    nodes = parser.integer("nodes_per_component", DEFAULT_NODES_PER_COMPONENT, MIN_NODES_PER_COMPONENT)
    directions = parser.integer("directions", DEFAULT_DIRECTIONS, MIN_DIRECTIONS)
    degree_min = parser.integer("degree_min", DEFAULT_DEGREE_MIN, 1)
    degree_max = parser.integer("degree_max", DEFAULT_DEGREE_MAX, 1)
    if degree_max > MAX_DEGREE:
        parser.issue(parser.values["degree_max"][0], f"degree_max must be at most {MAX_DEGREE}, got {degree_max}")
    if degree_min > degree_max:
        line = parser.values.get("degree_min", parser.values.get("degree_max", (0, "")))[0]
        parser.issue(line, f"degree_min {degree_min} exceeds degree_max {degree_max}")
    solver = parser.choice("solver", SOLVERS, "auto")
    tail_start = parser.integer("tail_start", DEFAULT_TAIL_START, 1)
    points = parser.points()
    output = Path(parser.values["output"][1]) if "output" in parser.values else None
    fmt = parser.choice("format", FORMATS, "csv")
    seed = parser.integer("seed", 0)

    curves = [c for c in components if not c.is_arc]
    if solver == "remez" and curves:
        parser.issue(parser.values["solver"][0], "solver = remez needs a system of intervals only")
    if experiment == "elliptic_compare" and not (len(components) == 2 and len(curves) == 1):
        parser.issue(
            parser.values["experiment"][0],
            "elliptic_compare needs exactly two components: one interval and one closed curve",
        )
    if experiment == "green" and len(components) == 1 and not points:
        parser.issue(
            parser.values["experiment"][0],
            "green on a single component has no critical points; give points to evaluate",
        )

    if parser.issues:
        raise ConfigError(parser.issues)
    return ExperimentConfig(
        components=tuple(components),
        experiment=experiment,
        nodes_per_component=nodes,
        directions=directions,
        degree_min=degree_min,
        degree_max=degree_max,
        solver=solver,
        tail_start=tail_start,
        points=points,
        output=output,
        format=fmt,
        seed=seed,
        component_text=tuple(" ".join(value.split()) for _, value in parser.components),
    )


def load_config(path: Path) -> ExperimentConfig:
    """Read and parse a config file.

    Raises:
        ConfigError: When the file is unreadable or fails parsing.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError([ConfigIssue(0, f"cannot read {path}: {exc}")], "load_config") from exc
    return parse_config(text)


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    """A finished experiment: derived constants plus one table.

    Attributes:
        kind: The experiment kind.
        columns: Column names, fixed per kind.
        rows: Data rows.
        constants: Derived constants in insertion order.
    """

    kind: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    constants: dict[str, object] = field(default_factory=dict)


COLUMNS: dict[str, tuple[str, ...]] = {
    "capacity": ("nodes", "capacity", "robin_constant", "potential_deviation"),
    "equilibrium": ("component", "kind", "mass", "harmonic_measure", "abs_diff"),
    "green": ("label", "re", "im", "g"),
    "ratio_sweep": ("n", "cheb_number", "ratio", "solver"),
    "elliptic_compare": ("n", "phase", "computed_ratio", "predicted_ratio", "rel_dev", "near_wrap"),
    "corollary_check": ("n", "ratio", "lower", "upper", "contained"),
}


def _system_constants(
    config: ExperimentConfig,
    system: CompactSystem,
    sol: EquilibriumSolution,
    known: dict[str, object],
) -> dict[str, object]:
    """Constants shared by every experiment; values already in `known` are reused."""
    constants: dict[str, object] = {
        "capacity": sol.capacity,
        "robin_constant": sol.robin_constant,
    }
    for index, mass in enumerate(sol.component_mass, start=1):
        constants[f"mass_{index}"] = mass
    constants["mass_arc"] = sol.arc_mass
    if "mod_omega" in known:
        constants["mod_omega"] = known["mod_omega"]
    elif system.p == 2:
        constants["mod_omega"] = condenser_modulus(system, config.nodes_per_component).modulus
    return constants


def _run_capacity(config, system, sol, jobs) -> ExperimentResult:
    result = ExperimentResult("capacity", COLUMNS["capacity"])
    full = config.nodes_per_component
    for count in sorted({full // 4, full // 2, full}):
        if count < MIN_NODES_PER_COMPONENT:
            continue
        coarse = sol if count == full else solve_equilibrium(discretize(system, count))
        result.rows.append(
            (count, coarse.capacity, coarse.robin_constant, potential_deviation(coarse))
        )
    return result


def _run_equilibrium(config, system, sol, jobs) -> ExperimentResult:
    result = ExperimentResult("equilibrium", COLUMNS["equilibrium"])
    measures = harmonic_measures(sol.boundary)
    for index, (component, mass, measure) in enumerate(
        zip(system.components, sol.component_mass, measures), start=1
    ):
        result.rows.append((index, component.kind.value, mass, measure, abs(mass - measure)))
    return result


def _run_green(config, system, sol, jobs) -> ExperimentResult:
    result = ExperimentResult("green", COLUMNS["green"])
    green = greens_function(sol, system)
    for point in green.critical_points:
        result.rows.append((f"critical_{point.gap + 1}", point.z, 0.0, point.g))
    for index, z in enumerate(config.points, start=1):
        result.rows.append((f"point_{index}", z.real, z.imag, float(green(z))))
    if green.critical_points:
        result.constants["critical_sum"] = green.critical_sum
    return result


def _run_ratio_sweep(config, system, sol, jobs) -> ExperimentResult:
    result = ExperimentResult("ratio_sweep", COLUMNS["ratio_sweep"])
    sweep = widom_sweep(
        system,
        config.degrees,
        sol.capacity,
        config.solver,
        config.nodes_per_component,
        config.directions,
        jobs,
    )
    for point in sweep:
        result.rows.append(
            (point.n, point.result.cheb_number, point.ratio, point.result.diagnostics.method)
        )
    report = check_theorem1(system, {p.n: p.ratio for p in sweep}, config.tail_start)
    if not report.skipped:
        result.constants.update(
            tail_max=report.tail_max, tail_min=report.tail_min, beta=report.beta
        )
    return result


def _run_elliptic_compare(config, system, sol, jobs) -> ExperimentResult:
    result = ExperimentResult("elliptic_compare", COLUMNS["elliptic_compare"])
    table = compare_prediction(
        system,
        config.degrees,
        config.nodes_per_component,
        config.directions,
        jobs,
        config.tail_start,
    )
    data = table.data
    result.constants.update(
        mod_omega=data.modulus_omega,
        omega_infinity=data.omega_infinity,
        abs_tau_prime=data.abs_tau_prime,
        nome_h=data.nome_h,
        tail_max_deviation=table.max_tail_deviation,
        tail_correlation=table.correlation,
    )
    report = check_theorem1(
        system,
        {row.n: row.computed_ratio for row in table.rows},
        config.tail_start,
        elliptic=data,
    )
    if not report.skipped:
        result.constants.update(
            tail_max=report.tail_max, tail_min=report.tail_min, beta=report.beta
        )
    for row in table.rows:
        result.rows.append(
            (row.n, row.phase, row.computed_ratio, row.predicted_ratio, row.rel_dev, row.near_wrap)
        )
    return result


def _run_corollary_check(config, system, sol, jobs) -> ExperimentResult:
    result = ExperimentResult("corollary_check", COLUMNS["corollary_check"])
    bounds = interval_bounds(sol, greens_function(sol, system))
    result.constants.update(interval_lower=bounds.lower, interval_upper=bounds.upper)
    sweep = widom_sweep(
        system,
        config.degrees,
        sol.capacity,
        config.solver,
        config.nodes_per_component,
        config.directions,
        jobs,
    )
    for point in sweep:
        contained = bounds.contains(point.ratio, CONTAINMENT_SLACK, CONTAINMENT_SLACK)
        result.rows.append((point.n, point.ratio, bounds.lower, bounds.upper, contained))
    return result


_PIPELINES = {
    "capacity": _run_capacity,
    "equilibrium": _run_equilibrium,
    "green": _run_green,
    "ratio_sweep": _run_ratio_sweep,
    "elliptic_compare": _run_elliptic_compare,
    "corollary_check": _run_corollary_check,
}


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Validate the system and run the configured pipeline.

    Args:
        config: Parsed config.
        jobs: Parallel degree solves for sweeps.

    Returns:
        The ExperimentResult with system constants first.

    Raises:
        ChebylabError: Any solver error, naming its module and operation.
    """
    system = config.system
    require_valid(system, "run")
    logger.info("running %s on %s", config.experiment, system.describe())
    sol = solve_equilibrium(discretize(system, config.nodes_per_component))
    result = _PIPELINES[config.experiment](config, system, sol, jobs)
    shared = _system_constants(config, system, sol, result.constants)
    result.constants = {**shared, **result.constants}
    return result
