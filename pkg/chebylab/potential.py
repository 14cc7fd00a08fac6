"""Equilibrium measure, Green's function and condenser modulus of E.

All three problems share one discretization: the logarithmic kernel
log(1/|z_i − z_j|) collocated at the boundary nodes, with node masses as
unknowns. The self-interaction entry is the local correction of the punctured
trapezoidal rule, log(2π/(w_i·|p′(t_i)|)), which makes the scheme exact on a
single interval and on the circle. A constraint row is adjoined per problem:

- equilibrium: total mass 1, unknown constant potential F (Robin constant);
- Dirichlet / condenser: total charge 0, unknown additive constant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg, optimize

from chebylab.config import DEFAULT_NODES_PER_COMPONENT
from chebylab.errors import PotentialError
from chebylab.geometry import CompactSystem, DiscretizedBoundary, discretize

logger = logging.getLogger(__name__)

# Green's function is undefined on the discrete charges themselves.
_NODE_GUARD = 1e-13

# Sign changes of ∂g/∂x are searched on this many points per gap.
_GAP_SAMPLES = 64


def _is_arc(component: object) -> bool:
    return bool(getattr(component, "is_arc", not getattr(component, "closed", True)))


def _log_kernel(boundary: DiscretizedBoundary, operation: str) -> np.ndarray:
    """Assemble the collocation matrix K_ij = log(1/|z_i − z_j|).

    Raises:
        PotentialError: When two nodes coincide.
    """
    z = boundary.nodes
    distance = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(distance, 1.0)
    if np.min(distance) <= _NODE_GUARD * max(boundary.diameter, 1.0):
        raise PotentialError("coincident boundary nodes (degenerate discretization)", operation)
    kernel = -np.log(distance)
    np.fill_diagonal(kernel, np.log(2 * np.pi / (boundary.weights * boundary.speeds)))
    return kernel


def _solve(matrix: np.ndarray, rhs: np.ndarray, operation: str) -> np.ndarray:
    try:
        solution = linalg.solve(matrix, rhs)
    except (linalg.LinAlgError, ValueError) as exc:
        raise PotentialError(f"singular collocation system: {exc}", operation) from exc
    if not np.all(np.isfinite(solution)):
        raise PotentialError("collocation system produced non-finite values", operation)
    return solution


# ---------------------------------------------------------------------------
# Equilibrium measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquilibriumSolution:
    """Discrete equilibrium measure ν_E.

    Attributes:
        boundary: The discretization the measure lives on.
        mu_weights: Node masses, summing to 1.
        robin_constant: F with ∫log(1/|z−t|)dν(t) = F on E.
        capacity: exp(−F).
        component_mass: ν_E(E_k) per component.
        arc_flags: Whether each component is an arc (part of E_arc).
    """

    boundary: DiscretizedBoundary
    mu_weights: np.ndarray
    robin_constant: float
    capacity: float
    component_mass: tuple[float, ...]
    arc_flags: tuple[bool, ...]

    @property
    def arc_mass(self) -> float:
        """ν_E(E_arc), the total mass on arc components."""
        return float(sum(m for m, arc in zip(self.component_mass, self.arc_flags) if arc))

    def potential(self, z: np.ndarray | complex) -> np.ndarray:
        """Discrete potential Σ μ_i log(1/|z − node_i|) at points off the nodes."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return -np.log(np.abs(z[..., None] - self.boundary.nodes)) @ self.mu_weights


def solve_equilibrium(boundary: DiscretizedBoundary) -> EquilibriumSolution:
    """Solve the equilibrium problem by dense log-kernel collocation.

    Unknowns are the node masses μ and the Robin constant F:

        Σ_j K_ij μ_j − F = 0   (every node i)
        Σ_j μ_j          = 1

    Args:
        boundary: Discretization of a valid system.

    Returns:
        The EquilibriumSolution.

    Raises:
        PotentialError: When the collocation system is singular.
    """
    size = boundary.size
    matrix = np.zeros((size + 1, size + 1))
    matrix[:size, :size] = _log_kernel(boundary, "solve_equilibrium")
    matrix[:size, size] = -1.0
    matrix[size, :size] = 1.0
    rhs = np.zeros(size + 1)
    rhs[size] = 1.0

    solution = _solve(matrix, rhs, "solve_equilibrium")
    mu, robin = solution[:size], float(solution[size])
    if mu.min() < -1e-12:
        logger.warning("equilibrium weights dip to %.3g; refine the boundary", mu.min())

    masses = tuple(
        float(mu[boundary.component_slice(k)].sum()) for k in range(boundary.p)
    )
    result = EquilibriumSolution(
        boundary=boundary,
        mu_weights=mu,
        robin_constant=robin,
        capacity=float(np.exp(-robin)),
        component_mass=masses,
        arc_flags=tuple(_is_arc(c) for c in boundary.components),
    )
    logger.debug(
        "equilibrium: N=%d F=%.15g C=%.15g", size, result.robin_constant, result.capacity
    )
    return result


def component_masses(sol: EquilibriumSolution) -> tuple[list[float], float]:
    """Per-component masses ν_E(E_k) and the arc mass ν_E(E_arc).

    Args:
        sol: A solved equilibrium problem.

    Returns:
        (masses in component order, ν_E(E_arc)).
    """
    return list(sol.component_mass), sol.arc_mass


def potential_deviation(sol: EquilibriumSolution) -> float:
    """Empirical discretization error ε(N) of the equilibrium potential.

    Evaluates the discrete potential halfway (in parameter) between
    consecutive nodes and reports the largest deviation from the Robin
    constant.
    """
    count = sol.boundary.nodes_per_component
    points = []
    for component in sol.boundary.components:
        if component.closed:
            params = (2 * np.arange(count) + 1) * np.pi / count
        else:
            params = np.arange(1, count) * np.pi / count
        points.append(component.point(params))
    values = sol.potential(np.concatenate(points))
    return float(np.max(np.abs(values - sol.robin_constant)))


def meets_capacity_bound(m_n: float, capacity: float, n: int, tolerance: float = 1e-9) -> bool:
    """Check M_n ≥ C(E)^n up to a relative tolerance, in log space."""
    return math.log(m_n) - n * math.log(capacity) >= math.log1p(-tolerance)


def _fekete_points(system: CompactSystem, points_per_component: int) -> list[np.ndarray]:
    """Near-Fekete points per component, ordered along the component.

    Charges start at the node rule and move along their parametrizations to
    minimize −Σ_{i<j} log|z_i − z_j|. Interval and arc parametrizations fold
    back onto the set outside [0, π], so the search needs no bounds and
    charges cannot pile up on an endpoint.

    Raises:
        PotentialError: When the energy minimization fails.
    """
    boundary = discretize(system, points_per_component)
    count = boundary.size
    owners = boundary.component_ids
    floor = _NODE_GUARD * max(boundary.diameter, 1.0)
    step = 1e-7

    def positions(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = np.empty(count, dtype=complex)
        dz = np.empty(count, dtype=complex)
        for index, component in enumerate(boundary.components):
            mask = owners == index
            t = theta[mask]
            z[mask] = component.point(t)
            dz[mask] = (component.point(t + step) - component.point(t - step)) / (2 * step)
        return z, dz

    def energy(theta: np.ndarray) -> tuple[float, np.ndarray]:
        z, dz = positions(theta)
        diff = z[:, None] - z[None, :]
        distance = np.abs(diff)
        np.fill_diagonal(distance, 1.0)
        close = distance < floor
        value = -0.5 * float(np.sum(np.log(np.maximum(distance, floor))))
        inverse = np.zeros_like(diff)
        np.divide(1.0, diff, out=inverse, where=~close)
        np.fill_diagonal(inverse, 0.0)
        gradient = -np.real(dz * inverse.sum(axis=1))
        return value, gradient

    result = optimize.minimize(
        energy,
        boundary.params,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 20000, "ftol": 1e-15, "gtol": 1e-10},
    )
    if not np.isfinite(result.fun):
        raise PotentialError(f"energy minimization failed: {result.message}", "fekete_capacity")

    z, _ = positions(result.x)
    ordered = []
    for index, component in enumerate(boundary.components):
        t = result.x[owners == index]
        if component.closed:
            key = np.mod(t, 2 * np.pi)
        else:
            key = np.abs(np.mod(t + np.pi, 2 * np.pi) - np.pi)
        ordered.append(z[owners == index][np.argsort(key)])
    return ordered


def _fekete_robin(points: list[np.ndarray], closed: list[bool]) -> float:
    """Robin constant of equal charges with the local self-term log(2π/h_i).

    h_i is the arclength a charge stands for (half the distance between its
    neighbours; one-sided at arc ends). Equal charges at Chebyshev points of
    [−1, 1] give log 2 up to O(1/M²) from the spacing estimate.
    """
    z = np.concatenate(points)
    count = z.size
    distance = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(distance, 1.0)
    self_terms = []
    for chain, is_closed in zip(points, closed):
        if is_closed:
            gaps = np.abs(np.diff(np.append(chain, chain[0])))
            spacing = 0.5 * (gaps + np.roll(gaps, 1))
        else:
            gaps = np.abs(np.diff(chain))
            spacing = np.empty(chain.size)
            spacing[1:-1] = 0.5 * (gaps[1:] + gaps[:-1])
            spacing[0], spacing[-1] = gaps[0], gaps[-1]
        self_terms.append(np.log(2 * np.pi / spacing))
    total = -float(np.sum(np.log(distance))) + float(np.sum(np.concatenate(self_terms)))
    return total / count**2


def fekete_capacity(system: CompactSystem, points_per_component: int = 64) -> float:
    """Capacity of E from near-Fekete point configurations.

    Independent of the collocation solver: the Robin constant of equal
    charges at near-Fekete points (with the local self-term) is computed for
    M, 2M and 4M charges per component and extrapolated in M with the model
    F + (a·log M + b)/M. The raw discrete diameter converges only like
    log M/M.

    Args:
        system: A valid system.
        points_per_component: Smallest charge count per component.

    Returns:
        exp(−F) for the extrapolated Robin constant F.

    Raises:
        PotentialError: When an energy minimization fails.
    """
    closed = [bool(component.closed) for component in system.components]
    sizes, estimates = [], []
    for level in range(3):
        count = points_per_component * 2**level
        chains = _fekete_points(system, count)
        sizes.append(float(sum(chain.size for chain in chains)))
        estimates.append(_fekete_robin(chains, closed))
    m = np.array(sizes)
    design = np.column_stack([np.ones(3), np.log(m) / m, 1.0 / m])
    robin = float(linalg.solve(design, np.array(estimates))[0])
    logger.debug("fekete robin estimates %s -> %.12g", estimates, robin)
    return float(np.exp(-robin))


# ---------------------------------------------------------------------------
# Neutral single layer: harmonic measure and condenser
# ---------------------------------------------------------------------------


def _neutral_single_layer(
    boundary: DiscretizedBoundary, data: np.ndarray, operation: str
) -> tuple[np.ndarray, np.ndarray]:
    """Solve u = Σ σ_j log(1/|z − z_j|) + c with Σ σ_j = 0.

    Args:
        boundary: The discretization.
        data: Dirichlet values at the nodes, shape (N,) or (N, r).
        operation: Caller name for error reporting.

    Returns:
        (charges σ, constants c), one column / entry per data column.
    """
    size = boundary.size
    data = data.reshape(size, -1)
    matrix = np.zeros((size + 1, size + 1))
    matrix[:size, :size] = _log_kernel(boundary, operation)
    matrix[:size, size] = 1.0
    matrix[size, :size] = 1.0
    rhs = np.zeros((size + 1, data.shape[1]))
    rhs[:size] = data
    solution = _solve(matrix, rhs, operation)
    return solution[:size], solution[size]


def harmonic_measures(boundary: DiscretizedBoundary) -> list[float]:
    """ω_k(∞) for every component from one factorization."""
    data = np.zeros((boundary.size, boundary.p))
    for k in range(boundary.p):
        data[boundary.component_slice(k), k] = 1.0
    _, constants = _neutral_single_layer(boundary, data, "harmonic_measure_at_infinity")
    return [float(c) for c in constants]


def harmonic_measure_at_infinity(
    system: CompactSystem,
    k: int,
    nodes_per_component: int = DEFAULT_NODES_PER_COMPONENT,
) -> float:
    """Harmonic measure of component k seen from infinity.

    Solves the Dirichlet problem with data 1 on E_k and 0 elsewhere by a
    charge-neutral single layer plus a constant; the constant is u(∞).
    Independent of solve_equilibrium, it cross-checks component_masses().

    Args:
        system: A valid system.
        k: Zero-based component index.
        nodes_per_component: Discretization size.

    Returns:
        ω_k(∞).

    Raises:
        PotentialError: For a bad index or a singular system.
    """
    if not 0 <= k < system.p:
        raise PotentialError(
            f"component index {k} out of range for p={system.p}", "harmonic_measure_at_infinity"
        )
    boundary = discretize(system, nodes_per_component)
    data = np.zeros(boundary.size)
    data[boundary.component_slice(k)] = 1.0
    _, constant = _neutral_single_layer(boundary, data, "harmonic_measure_at_infinity")
    return float(constant[0])


@dataclass(frozen=True)
class CondenserData:
    """Condenser between two plates of a doubly connected complement.

    Attributes:
        plate0: Index of the plate held at potential 0.
        plate1: Index of the plate held at potential 1.
        modulus: mod(Ω), normalized so an annulus gives (1/2π)ln(r2/r1).
        cap: Condenser capacity 1/modulus.
    """

    plate0: int
    plate1: int
    modulus: float
    cap: float


def condenser_modulus(
    system: CompactSystem, nodes_per_component: int = DEFAULT_NODES_PER_COMPONENT
) -> CondenserData:
    """Conformal modulus of the complement of a two-component system.

    The potential is 0 on E_1 and 1 on E_2. With a neutral single layer the
    Dirichlet energy equals 2π times the charge q on E_2, so the condenser
    capacity is 2πq and mod(Ω) = 1/(2πq). Concentric circles reproduce
    (1/2π)ln(r2/r1). The system is not validated here, so the concentric
    calibration configuration is accepted.

    Raises:
        PotentialError: When p ≠ 2 or the induced charge is not positive.
    """
    if system.p != 2:
        raise PotentialError(
            f"condenser modulus needs exactly two components, got {system.p}",
            "condenser_modulus",
        )
    boundary = discretize(system, nodes_per_component)
    data = np.zeros(boundary.size)
    data[boundary.component_slice(1)] = 1.0
    charges, _ = _neutral_single_layer(boundary, data, "condenser_modulus")
    charge = float(charges[boundary.component_slice(1)].sum())
    if not charge > 0:
        raise PotentialError(f"non-positive induced charge {charge:.3g}", "condenser_modulus")
    cap = 2 * np.pi * charge
    return CondenserData(plate0=0, plate1=1, modulus=1.0 / cap, cap=cap)


# ---------------------------------------------------------------------------
# Green's function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalPoint:
    """A critical point z_j* of g in the gap with the given index."""

    gap: int
    z: float
    g: float


@dataclass(frozen=True)
class GreenData:
    """Green's function g(z, ∞) of the outer complement component.

    Attributes:
        source: The equilibrium solution g is built from.
        critical_points: Located critical points, one per gap.
    """

    source: EquilibriumSolution
    critical_points: tuple[CriticalPoint, ...] = field(default_factory=tuple)

    def __call__(self, z: np.ndarray | complex) -> np.ndarray | float:
        """g(z) = Σ μ_i log|z − node_i| − log C(E).

        Raises:
            PotentialError: When z sits on a boundary node.
        """
        scalar = np.ndim(z) == 0
        points = np.atleast_1d(np.asarray(z, dtype=complex))
        distance = np.abs(points[..., None] - self.source.boundary.nodes)
        guard = _NODE_GUARD * max(self.source.boundary.diameter, 1.0)
        if np.any(distance.min(axis=-1) <= guard):
            raise PotentialError("g is undefined at a boundary node", "greens_function")
        values = np.log(distance) @ self.source.mu_weights + self.source.robin_constant
        return float(values[0]) if scalar else values

    def derivative(self, x: np.ndarray | float) -> np.ndarray:
        """∂g/∂x at real points: Σ μ_i Re 1/(x − node_i)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.real(1.0 / (x[:, None] - self.source.boundary.nodes)) @ self.source.mu_weights

    @property
    def critical_sum(self) -> float:
        """Σ g(z_j*) over the located critical points."""
        return float(sum(point.g for point in self.critical_points))


def critical_points(gd: GreenData, system: CompactSystem) -> list[CriticalPoint]:
    """Locate the p−1 real critical points of g, one per gap.

    ∂g/∂x is sampled on Chebyshev-clustered points inside each gap; the first
    + to − sign change is bracketed and refined with Brent's method.

    Args:
        gd: Green's data of the system.
        system: The real-symmetric system the data was solved on.

    Returns:
        Critical points in gap order (empty for a single component).

    Raises:
        PotentialError: When a gap shows no sign change (under-resolved) or the
            system is not real-symmetric.
    """
    if system.p < 2:
        return []
    if not gd.source.boundary.is_conjugation_symmetric():
        raise PotentialError("critical points need a real-symmetric system", "critical_points")

    clustered = 0.5 - 0.5 * np.cos(np.linspace(0.02, np.pi - 0.02, _GAP_SAMPLES))
    found = []
    for index, (left, right) in enumerate(system.gaps):
        xs = left + (right - left) * clustered
        slope = gd.derivative(xs)
        changes = np.nonzero((slope[:-1] > 0) & (slope[1:] <= 0))[0]
        if changes.size == 0:
            raise PotentialError(
                f"no sign change of dg/dx in gap {index + 1} ({left:g}, {right:g}); "
                "the equilibrium solve is under-resolved",
                "critical_points",
            )
        i = changes[0]
        if slope[i + 1] == 0:
            root = xs[i + 1]
        else:
            root = optimize.brentq(
                lambda x: float(gd.derivative(x)[0]), xs[i], xs[i + 1], xtol=1e-14, rtol=1e-14
            )
        found.append(CriticalPoint(gap=index, z=float(root), g=float(gd(complex(root)))))
    return found


def greens_function(
    sol: EquilibriumSolution, system: CompactSystem | None = None
) -> GreenData:
    """Build the Green's function evaluator.

    Args:
        sol: A solved equilibrium problem.
        system: When given with p ≥ 2, critical points are located as well.

    Returns:
        The GreenData.
    """
    data = GreenData(source=sol)
    if system is not None and system.p >= 2:
        data = replace(data, critical_points=tuple(critical_points(data, system)))
    return data
