"""Compact sets E and their singularity-aware boundary discretizations.

A system is an ordered list of disjoint components, each either a real
interval or a closed curve symmetric with respect to the real axis (circle or
axis-aligned ellipse). Every component is parametrized so that nodes absorb
the equilibrium density's endpoint behaviour:

1. Intervals use x(θ) = (α+β)/2 + ((β−α)/2)·cos θ on θ ∈ [0, π]; the
   inverse-square-root density at the endpoints becomes bounded in θ.
2. Closed curves use their natural 2π-periodic parameter.

The discretization is the only thing the potential and minimax solvers see.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, Sequence, Union

import numpy as np
from scipy import spatial

from chebylab.config import MIN_NODES_PER_COMPONENT
from chebylab.errors import GeometryError

logger = logging.getLogger(__name__)

# Reflection identity and disjointness are checked on sampled grids.
_SYMMETRY_SAMPLES = 64
_DISTANCE_SAMPLES = 256
_SYMMETRY_TOLERANCE = 1e-12


class ComponentKind(str, Enum):
    """Kinds of components a system may contain."""

    REAL_INTERVAL = "interval"
    SYMMETRIC_CURVE = "curve"


class Parametrized(Protocol):
    """What the discretizer needs from a component."""

    closed: bool

    def point(self, param: np.ndarray) -> np.ndarray: ...

    def speed(self, param: np.ndarray) -> np.ndarray: ...

    def node_parameters(self, count: int) -> np.ndarray: ...

    def refined_parameters(self, count: int) -> np.ndarray: ...

    @property
    def parameter_length(self) -> float: ...


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------


class OpenArc:
    """Shared parameter rules for arcs parametrized by θ ∈ [0, π]."""

    closed = False

    @property
    def parameter_length(self) -> float:
        return float(np.pi)

    def node_parameters(self, count: int) -> np.ndarray:
        """Midpoint nodes θ_j = (2j+1)π/(2N), j = 0..N−1."""
        return (2 * np.arange(count) + 1) * np.pi / (2 * count)

    def refined_parameters(self, count: int) -> np.ndarray:
        """Lobatto points θ_k = kπ/N, endpoints included."""
        return np.arange(count + 1) * np.pi / count


class ClosedCurve:
    """Shared parameter rules for 2π-periodic closed curves."""

    closed = True

    @property
    def parameter_length(self) -> float:
        return float(2 * np.pi)

    def node_parameters(self, count: int) -> np.ndarray:
        return 2 * np.pi * np.arange(count) / count

    def refined_parameters(self, count: int) -> np.ndarray:
        return 2 * np.pi * np.arange(count) / count

    def reflection_defect(self, samples: int = _SYMMETRY_SAMPLES) -> float:
        """Largest |p(2π−t) − conj(p(t))| over a sample grid."""
        t = self.refined_parameters(samples)
        return float(np.max(np.abs(self.point(2 * np.pi - t) - np.conj(self.point(t)))))


@dataclass(frozen=True)
class Interval(OpenArc):
    """Real interval [alpha, beta].

    Attributes:
        alpha: Left endpoint.
        beta: Right endpoint, strictly greater than alpha.
    """

    alpha: float
    beta: float

    kind = ComponentKind.REAL_INTERVAL
    is_arc = True

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.alpha + self.beta)

    @property
    def radius(self) -> float:
        return 0.5 * (self.beta - self.alpha)

    @property
    def real_extent(self) -> tuple[float, float]:
        return (self.alpha, self.beta)

    def point(self, param: np.ndarray) -> np.ndarray:
        return (self.midpoint + self.radius * np.cos(param)).astype(complex)

    def speed(self, param: np.ndarray) -> np.ndarray:
        return self.radius * np.abs(np.sin(param))

    def contains(self, z: np.ndarray) -> np.ndarray:
        """Intervals enclose nothing."""
        return np.zeros(np.shape(z), dtype=bool)

    def parameter_problems(self) -> list[str]:
        if not self.alpha < self.beta:
            return [f"interval [{self.alpha}, {self.beta}] needs alpha < beta"]
        return []

    def scaled(self, factor: float, shift: float) -> Interval:
        return Interval(factor * self.alpha + shift, factor * self.beta + shift)

    def describe(self) -> str:
        return f"interval {self.alpha:g} {self.beta:g}"


@dataclass(frozen=True)
class Circle(ClosedCurve):
    """Circle with real center.

    Attributes:
        center: Real center.
        radius: Positive radius.
    """

    center: float
    radius: float

    kind = ComponentKind.SYMMETRIC_CURVE
    is_arc = False

    @property
    def real_extent(self) -> tuple[float, float]:
        return (self.center - self.radius, self.center + self.radius)

    def point(self, param: np.ndarray) -> np.ndarray:
        return self.center + self.radius * np.exp(1j * np.asarray(param, dtype=float))

    def speed(self, param: np.ndarray) -> np.ndarray:
        return np.full(np.shape(param), float(self.radius))

    def contains(self, z: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(z) - self.center) < self.radius

    def parameter_problems(self) -> list[str]:
        if not self.radius > 0:
            return [f"circle at {self.center} needs radius > 0, got {self.radius}"]
        return []

    def scaled(self, factor: float, shift: float) -> Circle:
        return Circle(factor * self.center + shift, factor * self.radius)

    def describe(self) -> str:
        return f"circle {self.center:g} {self.radius:g}"


@dataclass(frozen=True)
class Ellipse(ClosedCurve):
    """Axis-aligned ellipse with real center.

    Attributes:
        center: Real center.
        semi_x: Semi-axis along the real line.
        semi_y: Semi-axis along the imaginary line.
    """

    center: float
    semi_x: float
    semi_y: float

    kind = ComponentKind.SYMMETRIC_CURVE
    is_arc = False

    @property
    def real_extent(self) -> tuple[float, float]:
        return (self.center - self.semi_x, self.center + self.semi_x)

    def point(self, param: np.ndarray) -> np.ndarray:
        t = np.asarray(param, dtype=float)
        return self.center + self.semi_x * np.cos(t) + 1j * self.semi_y * np.sin(t)

    def speed(self, param: np.ndarray) -> np.ndarray:
        t = np.asarray(param, dtype=float)
        return np.hypot(self.semi_x * np.sin(t), self.semi_y * np.cos(t))

    def contains(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z)
        u = (z.real - self.center) / self.semi_x
        v = z.imag / self.semi_y
        return u * u + v * v < 1.0

    def parameter_problems(self) -> list[str]:
        if not (self.semi_x > 0 and self.semi_y > 0):
            return [
                f"ellipse at {self.center} needs positive semi-axes, "
                f"got {self.semi_x}, {self.semi_y}"
            ]
        return []

    def scaled(self, factor: float, shift: float) -> Ellipse:
        return Ellipse(factor * self.center + shift, factor * self.semi_x, factor * self.semi_y)

    def describe(self) -> str:
        return f"ellipse {self.center:g} {self.semi_x:g} {self.semi_y:g}"


Component = Union[Interval, Circle, Ellipse]


# ---------------------------------------------------------------------------
# Systems and validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompactSystem:
    """The compact set E as an ordered tuple of components.

    Attributes:
        components: Components in left-to-right order along the real axis.
    """

    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def p(self) -> int:
        """Number of components."""
        return len(self.components)

    @property
    def arc_indices(self) -> tuple[int, ...]:
        """Indices of the interval (arc) components."""
        return tuple(i for i, c in enumerate(self.components) if c.is_arc)

    @property
    def curve_indices(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.components) if not c.is_arc)

    @property
    def all_intervals(self) -> bool:
        return all(c.is_arc for c in self.components)

    @property
    def real_extent(self) -> tuple[float, float]:
        """Leftmost and rightmost real points of E."""
        lefts, rights = zip(*(c.real_extent for c in self.components))
        return (min(lefts), max(rights))

    @property
    def gaps(self) -> list[tuple[float, float]]:
        """Contiguous real gaps (β_k, α_{k+1}) between consecutive components."""
        extents = [c.real_extent for c in self.components]
        return [(extents[k][1], extents[k + 1][0]) for k in range(len(extents) - 1)]

    def affine(self, factor: float, shift: float) -> CompactSystem:
        """Map E to factor·E + shift (factor > 0, shift real)."""
        if not factor > 0:
            raise GeometryError(f"affine factor must be positive, got {factor}", "affine")
        return CompactSystem(tuple(c.scaled(factor, shift) for c in self.components))

    def describe(self) -> str:
        return " ∪ ".join(c.describe() for c in self.components)


@dataclass
class ValidationReport:
    """Outcome of validate_system().

    Attributes:
        violations: Every violated invariant, human-readable.
        gaps: Real gaps between consecutive components.
        arc_indices: Indices of interval components (E_arc).
        p: Number of components.
        min_distance: Smallest sampled distance between distinct components.
    """

    violations: list[str] = field(default_factory=list)
    gaps: list[tuple[float, float]] = field(default_factory=list)
    arc_indices: tuple[int, ...] = ()
    p: int = 0
    min_distance: float = float("inf")

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_system(system: CompactSystem) -> ValidationReport:
    """Check disjointness, ordering and real symmetry of a system.

    Never raises; the report lists every violated invariant. Callers must
    refuse invalid systems (see require_valid()).

    Args:
        system: The system to check.

    Returns:
        A ValidationReport.
    """
    report = ValidationReport(p=system.p, arc_indices=system.arc_indices)
    if system.p == 0:
        report.violations.append("system has no components")
        return report

    for index, component in enumerate(system.components):
        for problem in component.parameter_problems():
            report.violations.append(f"component {index + 1}: {problem}")
        if isinstance(component, ClosedCurve) and not component.parameter_problems():
            defect = component.reflection_defect()
            if defect > _SYMMETRY_TOLERANCE * max(1.0, abs(component.real_extent[1])):
                report.violations.append(
                    f"component {index + 1}: not symmetric about the real axis "
                    f"(defect {defect:.3g})"
                )
    if report.violations:
        return report

    extents = [c.real_extent for c in system.components]
    for k in range(system.p - 1):
        left, right = extents[k], extents[k + 1]
        if right[0] <= left[1] and left[0] < right[1]:
            report.violations.append(
                f"components {k + 1} and {k + 2} overlap on the real axis "
                f"([{left[0]:g}, {left[1]:g}] and [{right[0]:g}, {right[1]:g}])"
            )
        elif right[0] <= left[1]:
            report.violations.append(
                f"components {k + 1} and {k + 2} are out of order "
                f"(need beta_{k + 1} < alpha_{k + 2})"
            )

    samples = [
        c.point(c.refined_parameters(_DISTANCE_SAMPLES)) for c in system.components
    ]
    for i in range(system.p):
        for j in range(i + 1, system.p):
            distance = float(np.min(np.abs(samples[i][:, None] - samples[j][None, :])))
            report.min_distance = min(report.min_distance, distance)
            if distance <= 1e-12 * max(1.0, abs(system.real_extent[1])):
                report.violations.append(f"components {i + 1} and {j + 1} intersect")
            inside = system.components[i].contains(samples[j]).any() or system.components[
                j
            ].contains(samples[i]).any()
            if inside:
                report.violations.append(
                    f"components {i + 1} and {j + 1} are not mutually exterior"
                )

    if not report.violations:
        report.gaps = system.gaps
    return report


def require_valid(system: CompactSystem, operation: str = "validate_system") -> ValidationReport:
    """Validate a system and refuse it when any invariant fails.

    Raises:
        GeometryError: Listing every violation.
    """
    report = validate_system(system)
    if not report.valid:
        raise GeometryError("invalid system: " + "; ".join(report.violations), operation)
    return report


# ---------------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscretizedBoundary:
    """Quadrature nodes on ∂E.

    Attributes:
        nodes: Complex node positions.
        weights: Parameter weights (π/N on intervals, 2π/N on curves).
        speeds: Parametrization speed |p′| at each node.
        params: Parameter value of each node.
        component_ids: Owning component index per node.
        singular: True for interval nodes within one spacing of an endpoint.
        components: The parametrized components, in order.
        nodes_per_component: N.
    """

    nodes: np.ndarray
    weights: np.ndarray
    speeds: np.ndarray
    params: np.ndarray
    component_ids: np.ndarray
    singular: np.ndarray
    components: tuple[Parametrized, ...]
    nodes_per_component: int

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def p(self) -> int:
        return len(self.components)

    @property
    def diameter(self) -> float:
        """Diameter estimate from the node bounding box."""
        span = np.ptp(self.nodes.real) + 1j * np.ptp(self.nodes.imag)
        return float(abs(span))

    def component_slice(self, index: int) -> slice:
        start = index * self.nodes_per_component
        return slice(start, start + self.nodes_per_component)

    def conjugation_defect(self) -> float:
        """Largest distance from a conjugated node to its nearest node."""
        tree = spatial.cKDTree(np.column_stack([self.nodes.real, self.nodes.imag]))
        distance, _ = tree.query(np.column_stack([self.nodes.real, -self.nodes.imag]))
        return float(np.max(distance))

    def is_conjugation_symmetric(self, tolerance: float = 1e-12) -> bool:
        """True when every conjugated node coincides with some node."""
        scale = max(1.0, float(np.max(np.abs(self.nodes))))
        return self.conjugation_defect() <= tolerance * scale

    def refined(self, factor: int) -> tuple[np.ndarray, np.ndarray]:
        """Closed refinement samples for max-modulus re-evaluation.

        Args:
            factor: Refinement factor relative to the node count.

        Returns:
            (points, component_ids); interval samples include both endpoints.
        """
        points, owners = [], []
        for index, component in enumerate(self.components):
            params = component.refined_parameters(factor * self.nodes_per_component)
            points.append(component.point(params))
            owners.append(np.full(params.size, index))
        return np.concatenate(points), np.concatenate(owners)


def discretize_components(
    components: Sequence[Parametrized], nodes_per_component: int
) -> DiscretizedBoundary:
    """Discretize any parametrized components with the per-kind node rule.

    Args:
        components: Components exposing the Parametrized protocol.
        nodes_per_component: Node count N for every component.

    Returns:
        The DiscretizedBoundary.

    Raises:
        GeometryError: When N is below the solvers' minimum.
    """
    if nodes_per_component < MIN_NODES_PER_COMPONENT:
        raise GeometryError(
            f"{nodes_per_component} nodes per component is too coarse "
            f"(minimum {MIN_NODES_PER_COMPONENT})",
            "discretize",
        )
    count = nodes_per_component
    nodes, weights, speeds, params, owners, singular = [], [], [], [], [], []
    for index, component in enumerate(components):
        t = component.node_parameters(count)
        nodes.append(component.point(t))
        weights.append(np.full(count, component.parameter_length / count))
        speeds.append(component.speed(t))
        params.append(t)
        owners.append(np.full(count, index))
        if component.closed:
            singular.append(np.zeros(count, dtype=bool))
        else:
            spacing = np.pi / count
            singular.append((t < spacing) | (t > np.pi - spacing))

    boundary = DiscretizedBoundary(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        speeds=np.concatenate(speeds),
        params=np.concatenate(params),
        component_ids=np.concatenate(owners),
        singular=np.concatenate(singular),
        components=tuple(components),
        nodes_per_component=count,
    )
    logger.debug("discretized %d components with %d nodes each", len(components), count)
    return boundary


def discretize(system: CompactSystem, nodes_per_component: int) -> DiscretizedBoundary:
    """Discretize a (valid) system.

    Args:
        system: The compact set; callers validate it first.
        nodes_per_component: Node count per component (at least 8).

    Returns:
        The DiscretizedBoundary.
    """
    return discretize_components(system.components, nodes_per_component)
