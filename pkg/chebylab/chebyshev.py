"""Monic minimax polynomials and Chebyshev numbers M_n.

Two solvers share one conditioned representation of monic polynomials:

- remez_real: multi-interval Remez exchange on purely real sets, followed by
  continuous refinement of the reference so M_n is exact rather than
  grid-limited;
- minimax_lp: direction-discretized linear program on any real-symmetric
  set, with a semi-infinite exchange step (local maximizers of |T_n| are
  added as constraints) and a Lawson polish; M_n is re-evaluated on a refined
  grid rather than read off the LP objective.

Monic polynomials are written as exp(log_leading)·(φ_n(s) + Σ_{k<n} d_k φ_k(s))
in the rescaled variable s = (z − center)/scale, and every monic quantity is
carried in log space.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import linalg, optimize

from chebylab.config import (
    DEFAULT_DIRECTIONS,
    DEFAULT_NODES_PER_COMPONENT,
    EXCHANGE_ROUNDS,
    LAWSON_ITERATIONS,
    MAX_DEGREE,
    MIN_DIRECTIONS,
    REFINEMENT_FACTOR,
    REMEZ_CONTINUOUS_ROUNDS,
    REMEZ_GRID_PER_INTERVAL,
    REMEZ_GRID_TOLERANCE,
    REMEZ_MAX_ITERATIONS,
    REMEZ_TOLERANCE,
)
from chebylab.errors import ChebyshevError
from chebylab.geometry import (
    CompactSystem,
    DiscretizedBoundary,
    OpenArc,
    discretize,
    discretize_components,
    require_valid,
)
from chebylab.potential import solve_equilibrium

logger = logging.getLogger(__name__)

# Local maxima within this fraction of the current maximum are polished.
_POLISH_BAND = 1e-2
# Refined maximum above the node maximum by more than this is under-resolved.
_RESOLUTION_WARNING = 1e-3
# Extreme points are those within this factor of M_n.
_EXTREME_BAND = 1e-6


# ---------------------------------------------------------------------------
# Conditioned basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionedBasis:
    """Polynomial basis φ_0..φ_n in s = (z − center)/scale.

    With ``hessenberg`` unset the basis is Chebyshev polynomials of the first
    kind. With it set, the basis is the Arnoldi-orthonormalized one on a node
    set (Vandermonde with Arnoldi): φ_{k+1} = (s·φ_k − Σ_j H[j,k]φ_j)/H[k+1,k].
    On sets with curve components the Chebyshev values grow like
    |s + √(s²−1)|^n while M_n decays, so only the Arnoldi variant keeps its
    digits at the degrees the elliptic experiments need.

    Attributes:
        center: Center of E.
        scale: Half-diameter of E.
        degree: n.
        hessenberg: Arnoldi recurrence coefficients, shape (n+1, n), or None.
    """

    center: complex
    scale: float
    degree: int
    hessenberg: np.ndarray | None = None

    @classmethod
    def chebyshev(cls, center: complex, scale: float, degree: int) -> ConditionedBasis:
        return cls(center=complex(center), scale=float(scale), degree=degree)

    @classmethod
    def arnoldi(
        cls,
        center: complex,
        scale: float,
        degree: int,
        nodes: np.ndarray,
        real: bool = False,
    ) -> ConditionedBasis:
        """Orthonormalize on ``nodes`` with twice-repeated Gram–Schmidt.

        Args:
            center: Center of E.
            scale: Half-diameter of E.
            degree: n.
            nodes: Discrete inner-product points.
            real: Keep only the real part of H (conjugation-symmetric nodes,
                where the basis polynomials have real coefficients).
        """
        s = (np.asarray(nodes, dtype=complex) - center) / scale
        count = s.size
        q = np.zeros((count, degree + 1), dtype=complex)
        q[:, 0] = 1.0
        h = np.zeros((degree + 1, degree), dtype=complex)
        for k in range(degree):
            v = s * q[:, k]
            for _ in range(2):
                projection = q[:, : k + 1].conj().T @ v / count
                v = v - q[:, : k + 1] @ projection
                h[: k + 1, k] += projection
            h[k + 1, k] = np.linalg.norm(v) / math.sqrt(count)
            if h[k + 1, k] == 0:
                raise ChebyshevError(
                    f"Arnoldi breakdown at degree {k + 1}: too few distinct nodes", "minimax_lp"
                )
            q[:, k + 1] = v / h[k + 1, k]
        if real:
            h = h.real.astype(complex)
        return cls(center=complex(center), scale=float(scale), degree=degree, hessenberg=h)

    @property
    def kind(self) -> str:
        return "chebyshev" if self.hessenberg is None else "arnoldi"

    @property
    def log_leading(self) -> float:
        """log of the factor turning the φ_n-normalized form into a monic one.

        Chebyshev: n·log(scale) + (1−n)·log 2 (the top coefficient of T_n is
        2^{n−1}). Arnoldi: n·log(scale) + Σ log H[k+1,k].
        """
        n = self.degree
        if self.hessenberg is None:
            return n * math.log(self.scale) + (1 - n) * math.log(2.0) if n else 0.0
        subdiagonal = np.abs(np.diagonal(self.hessenberg, offset=-1))
        return n * math.log(self.scale) + float(np.sum(np.log(subdiagonal)))

    @property
    def leading_coefficient_map(self) -> float:
        return math.exp(self.log_leading)

    def variable(self, z: np.ndarray | complex) -> np.ndarray:
        return (np.atleast_1d(np.asarray(z, dtype=complex)) - self.center) / self.scale

    def values(self, z: np.ndarray | complex) -> np.ndarray:
        """Basis values, shape (len(z), n+1)."""
        s = self.variable(z)
        if self.hessenberg is None:
            return cheb.chebvander(s, self.degree)
        h = self.hessenberg
        out = np.empty((s.size, self.degree + 1), dtype=complex)
        out[:, 0] = 1.0
        for k in range(self.degree):
            v = s * out[:, k] - out[:, : k + 1] @ h[: k + 1, k]
            out[:, k + 1] = v / h[k + 1, k]
        return out

    def normalized(self, coefficients: np.ndarray, z: np.ndarray | complex) -> np.ndarray:
        """φ_n(s) + Σ d_k φ_k(s), i.e. the monic polynomial over its leading factor."""
        full = np.append(np.asarray(coefficients), 1.0)
        return self.values(z) @ full

    def monic(self, coefficients: np.ndarray, z: np.ndarray | complex) -> np.ndarray:
        """The monic polynomial z^n + ⋯ at z."""
        return self.leading_coefficient_map * self.normalized(coefficients, z)


def _frame(points: np.ndarray) -> tuple[complex, float]:
    """Center and half-diameter of a point cloud's bounding box."""
    re, im = points.real, points.imag
    center = complex(0.5 * (re.max() + re.min()), 0.5 * (im.max() + im.min()))
    scale = 0.5 * max(float(np.ptp(re)), float(np.ptp(im)))
    return center, scale


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


@dataclass
class SolverDiagnostics:
    """What a solver reports besides M_n.

    Attributes:
        method: 'remez' or 'lp'.
        iterations: Exchange iterations (Remez) or LP solves (LP).
        gap: Final relative levelling gap (Remez) or relative gap between the
            refined maximum and the LP objective (LP).
        lp_epsilon: LP objective in normalized units (LP only).
        relaxation_bound: sec(π/m), the polygonal overestimate factor bound.
        lawson_used: Whether the Lawson polish beat the LP polynomial.
        warnings: Human-readable warnings (e.g. under-resolved boundary).
    """

    method: str
    iterations: int = 0
    gap: float = 0.0
    lp_epsilon: float | None = None
    relaxation_bound: float | None = None
    lawson_used: bool = False
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class MinimaxResult:
    """A monic minimax polynomial and its Chebyshev number.

    Attributes:
        degree: n.
        cheb_number: M_n = ‖T_n‖_E.
        log_cheb_number: log M_n (use this for large n).
        basis: The conditioned basis the coefficients refer to.
        coefficients: d_0..d_{n−1} of the normalized form.
        extreme_points: Points where |T_n| is within 1e−6 of M_n, in order.
        extreme_signs: Sign of T_n at each extreme point (real sets), else 0.
        diagnostics: Solver diagnostics.
    """

    degree: int
    cheb_number: float
    log_cheb_number: float
    basis: ConditionedBasis
    coefficients: np.ndarray
    extreme_points: np.ndarray
    extreme_signs: np.ndarray
    diagnostics: SolverDiagnostics

    def __call__(self, z: np.ndarray | complex) -> np.ndarray:
        """Evaluate T_n(z)."""
        return self.basis.monic(self.coefficients, z)


def _check_degree(n: int, operation: str) -> None:
    if not 1 <= n <= MAX_DEGREE:
        raise ChebyshevError(f"degree must lie in 1..{MAX_DEGREE}, got {n}", operation)


# ---------------------------------------------------------------------------
# Remez exchange on real sets
# ---------------------------------------------------------------------------


def _remez_grid(system: CompactSystem, per_interval: int) -> tuple[np.ndarray, np.ndarray]:
    """Ascending Lobatto grid on every interval, with owning interval ids."""
    xs, owners = [], []
    for index, component in enumerate(system.components):
        params = component.refined_parameters(per_interval)[::-1]
        xs.append(component.point(params).real)
        owners.append(np.full(params.size, index))
    return np.concatenate(xs), np.concatenate(owners)


def _levelled_solve(
    basis_rows: np.ndarray, target: np.ndarray
) -> tuple[np.ndarray, float]:
    """Solve Σ d_k φ_k(x_i) − (−1)^i h = −φ_n(x_i) for (d, h)."""
    size = target.size
    matrix = np.empty((size, size))
    matrix[:, :-1] = basis_rows
    matrix[:, -1] = -((-1.0) ** np.arange(size))
    try:
        solution = linalg.solve(matrix, -target)
    except (linalg.LinAlgError, ValueError) as exc:
        raise ChebyshevError(f"singular levelled system: {exc}", "remez_real") from exc
    return solution[:-1], float(solution[-1])


def _exchange(error: np.ndarray, size: int) -> np.ndarray:
    """Pick a new alternating reference of ``size`` grid indices.

    Takes the largest |error| in every run of constant sign, then removes the
    smallest candidates (at the ends singly, in the interior as adjacent
    pairs) until ``size`` remain; the global maximizer always survives.
    """
    signs = np.where(error >= 0, 1, -1)
    starts = np.concatenate(([0], np.nonzero(np.diff(signs))[0] + 1))
    stops = np.append(starts[1:], error.size)
    candidates = [start + int(np.argmax(np.abs(error[start:stop]))) for start, stop in zip(starts, stops)]
    if len(candidates) < size:
        raise ChebyshevError(
            f"only {len(candidates)} sign alternations for a reference of {size}", "remez_real"
        )
    while len(candidates) > size:
        magnitude = np.abs(error[candidates])
        smallest = int(np.argmin(magnitude))
        excess = len(candidates) - size
        if smallest in (0, len(candidates) - 1):
            del candidates[smallest]
        elif excess == 1:
            end = 0 if magnitude[0] <= magnitude[-1] else len(candidates) - 1
            del candidates[end]
        else:
            left, right = smallest - 1, smallest + 1
            partner = left if magnitude[left] <= magnitude[right] else right
            for index in sorted((smallest, partner), reverse=True):
                del candidates[index]
    return np.asarray(candidates)


def _local_maximum(
    objective: Callable[[float], float], lo: float, hi: float, start: float
) -> tuple[float, float]:
    """Maximize ``objective`` on [lo, hi], never returning less than at ``start``."""
    best_x, best = start, objective(start)
    for edge in (lo, hi):
        value = objective(edge)
        if value > best:
            best_x, best = edge, value
    if hi > lo:
        found = optimize.minimize_scalar(
            lambda x: -objective(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-15}
        )
        if found.success and -found.fun > best:
            best_x, best = float(found.x), float(-found.fun)
    return best_x, best


def _continuous_reference(
    basis: ConditionedBasis,
    coefficients: np.ndarray,
    grid: np.ndarray,
    owners: np.ndarray,
    lower: np.ndarray,
    target: np.ndarray,
    n: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Alternating reference of n+1 continuous local maximizers of |error|.

    The exchange runs on the grid; each chosen grid point is then moved to
    the maximizer of |error| between its grid neighbours on the same interval.

    Returns:
        (points, signed error values at the points).
    """
    reference = _exchange(target + lower @ coefficients, n + 1)

    def magnitude(x: float) -> float:
        return float(abs(basis.normalized(coefficients, x).real[0]))

    points = np.empty(reference.size)
    for slot, index in enumerate(reference):
        left = index - 1 if index > 0 and owners[index - 1] == owners[index] else index
        right = index + 1 if index + 1 < grid.size and owners[index + 1] == owners[index] else index
        points[slot] = _local_maximum(magnitude, grid[left], grid[right], grid[index])[0]
    return points, basis.normalized(coefficients, points).real


def remez_real(
    system: CompactSystem, n: int, grid_per_interval: int = REMEZ_GRID_PER_INTERVAL
) -> MinimaxResult:
    """Chebyshev polynomial of an all-interval set by Remez exchange.

    The reference holds n+1 points (the alternation set of the best
    approximation of x^n from polynomials of degree n−1). The discrete
    exchange runs on a Lobatto grid of every interval until the levelling gap
    reaches grid resolution or a reference repeats. The exchange then goes on
    against continuous local maximizers of |error| until the gap is below
    REMEZ_TOLERANCE, so M_n is not limited by the grid. A gap still above it
    after REMEZ_CONTINUOUS_ROUNDS rounds is reported as a diagnostics warning.

    Args:
        system: Valid system of real intervals.
        n: Degree, at least 1.
        grid_per_interval: Lobatto grid size per interval.

    Returns:
        The MinimaxResult.

    Raises:
        ChebyshevError: For curve components, bad degrees, or a grid exchange
            that neither settles nor cycles within REMEZ_MAX_ITERATIONS.
    """
    if not system.all_intervals:
        raise ChebyshevError(
            "remez_real needs an all-interval system; use minimax_lp for curves", "remez_real"
        )
    _check_degree(n, "remez_real")
    lo, hi = system.real_extent
    basis = ConditionedBasis.chebyshev(0.5 * (lo + hi), 0.5 * (hi - lo), n)

    grid, owners = _remez_grid(system, grid_per_interval)
    table = basis.values(grid).real
    lower, target = table[:, :n], table[:, n]
    reference = np.unique(np.round(np.linspace(0, grid.size - 1, n + 1)).astype(int))
    if reference.size < n + 1:
        raise ChebyshevError("grid too small for the requested degree", "remez_real")

    # Grid phase: stops at grid resolution or when a reference comes back.
    gap = float("inf")
    seen = {tuple(reference)}
    for iteration in range(1, REMEZ_MAX_ITERATIONS + 1):
        coefficients, level = _levelled_solve(lower[reference], target[reference])
        error = target + lower @ coefficients
        peak = float(np.max(np.abs(error)))
        gap = (peak - abs(level)) / peak
        if gap < REMEZ_GRID_TOLERANCE:
            break
        reference = _exchange(error, n + 1)
        if tuple(reference) in seen:
            coefficients, level = _levelled_solve(lower[reference], target[reference])
            break
        seen.add(tuple(reference))
    else:
        raise ChebyshevError(
            f"Remez stagnated after {REMEZ_MAX_ITERATIONS} iterations (gap {gap:.3g}, n={n})",
            "remez_real",
        )
    logger.debug("remez n=%d: grid exchange settled after %d iterations (gap %.3g)", n, iteration, gap)

    # Continuous phase: exchange against polished local maxima.
    points, values = _continuous_reference(basis, coefficients, grid, owners, lower, target, n)
    norm = float(np.max(np.abs(values)))
    gap = (norm - abs(level)) / norm
    rounds = 0
    while gap > REMEZ_TOLERANCE and rounds < REMEZ_CONTINUOUS_ROUNDS:
        rounds += 1
        rows = basis.values(points).real
        coefficients, level = _levelled_solve(rows[:, :n], rows[:, n])
        points, values = _continuous_reference(basis, coefficients, grid, owners, lower, target, n)
        norm = float(np.max(np.abs(values)))
        gap = (norm - abs(level)) / norm

    diagnostics = SolverDiagnostics(method="remez", iterations=iteration + rounds, gap=gap)
    if gap > REMEZ_TOLERANCE:
        message = f"Remez levelling gap {gap:.3g} above {REMEZ_TOLERANCE:g} at n={n}"
        diagnostics.warnings.append(message)
        logger.warning(message)

    keep = np.abs(values) >= (1 - _EXTREME_BAND) * norm
    log_m = basis.log_leading + math.log(norm)
    return MinimaxResult(
        degree=n,
        cheb_number=math.exp(log_m),
        log_cheb_number=log_m,
        basis=basis,
        coefficients=coefficients,
        extreme_points=points[keep].astype(complex),
        extreme_signs=np.sign(values[keep]),
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Direction-discretized LP with exchange and Lawson polish
# ---------------------------------------------------------------------------


def _rotate(rows: np.ndarray, directions: int) -> np.ndarray:
    """Rows multiplied by every e^{iθ_ℓ}, shape (M·m, n+1)."""
    rotation = np.exp(2j * np.pi * np.arange(directions) / directions)
    return (rotation[None, :, None] * rows[:, None, :]).reshape(-1, rows.shape[1])


def _solve_lp(
    rows: np.ndarray, directions: int, real: bool, on_axis: np.ndarray | None = None
) -> tuple[np.ndarray, float]:
    """min ε s.t. Re(e^{iθ_ℓ}·(φ_n + Σ d_k φ_k)(z_j)) ≤ ε for all j, ℓ.

    With real coefficients the polynomial is real on the real axis, so
    on-axis points only need the two directions 0 and π (|T| ≤ ε exactly).

    Args:
        rows: Basis values at the constraint points, shape (M, n+1).
        directions: m.
        real: Restrict d to real values.
        on_axis: Which constraint points lie on the real axis.

    Returns:
        (d, ε).
    """
    n = rows.shape[1] - 1
    if real:
        axis = np.zeros(rows.shape[0], dtype=bool) if on_axis is None else on_axis
        blocks = []
        if axis.any():
            blocks += [rows[axis].real, -rows[axis].real]
        if not axis.all():
            blocks.append(_rotate(rows[~axis], directions).real)
        constraints = np.vstack(blocks)
        lhs, b_ub = constraints[:, :n], -constraints[:, n]
    else:
        rotated = _rotate(rows, directions)
        lhs, b_ub = np.hstack([rotated[:, :n].real, -rotated[:, :n].imag]), -rotated[:, n].real
    a_ub = np.hstack([lhs, -np.ones((lhs.shape[0], 1))])
    cost = np.zeros(a_ub.shape[1])
    cost[-1] = 1.0
    result = optimize.linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=(None, None), method="highs")
    if not result.success:
        raise ChebyshevError(f"minimax LP failed: {result.message}", "minimax_lp")
    x = result.x
    coefficients = x[:n] if real else x[:n] + 1j * x[n : 2 * n]
    return coefficients, float(x[-1])


def _lawson(
    rows: np.ndarray, weights: np.ndarray, iterations: int, real: bool
) -> np.ndarray:
    """Lawson's reweighted least squares towards the minimax on the rows' points."""
    n = rows.shape[1] - 1
    lower, target = rows[:, :n], rows[:, n]
    w = weights / weights.sum()
    coefficients = np.zeros(n, dtype=float if real else complex)
    for _ in range(iterations):
        root = np.sqrt(w)[:, None]
        if real:
            design = np.vstack([(root * lower).real, (root * lower).imag])
            rhs = -np.concatenate([(root[:, 0] * target).real, (root[:, 0] * target).imag])
        else:
            design, rhs = root * lower, -root[:, 0] * target
        coefficients = np.linalg.lstsq(design, rhs, rcond=None)[0]
        residual = np.abs(target + lower @ coefficients)
        w = w * residual
        total = w.sum()
        if not total > 0:
            break
        w = w / total
    return coefficients


def _refined_maximum(
    basis: ConditionedBasis,
    coefficients: np.ndarray,
    components: Sequence,
    samples: int,
) -> tuple[float, np.ndarray]:
    """Max of |normalized polynomial| on a refined grid, local maxima polished.

    Returns:
        (maximum, maximizer points near the top).
    """
    best, maximizers = 0.0, []
    per_component = []
    for component in components:
        params = component.refined_parameters(samples)
        values = np.abs(basis.normalized(coefficients, component.point(params)))
        per_component.append((component, params, values))
        best = max(best, float(values.max()))
    threshold = (1 - _POLISH_BAND) * best

    for component, params, values in per_component:
        size = params.size
        if component.closed:
            left, right = np.roll(values, 1), np.roll(values, -1)
        else:
            left = np.concatenate(([-np.inf], values[:-1]))
            right = np.concatenate((values[1:], [-np.inf]))
        peaks = np.nonzero((values >= left) & (values >= right) & (values >= threshold))[0]

        def magnitude(t: float, component=component) -> float:
            return float(abs(basis.normalized(coefficients, component.point(np.array([t])))[0]))

        for i in peaks:
            if component.closed:
                step = params[1] - params[0]
                lo, hi = params[i] - step, params[i] + step
            else:
                lo, hi = params[max(i - 1, 0)], params[min(i + 1, size - 1)]
            t, value = _local_maximum(magnitude, lo, hi, params[i])
            best = max(best, value)
            maximizers.append((value, complex(component.point(np.array([t]))[0])))

    top = [z for value, z in maximizers if value >= (1 - _POLISH_BAND) * best]
    return best, np.asarray(top, dtype=complex)


def minimax_lp(
    boundary: DiscretizedBoundary,
    n: int,
    directions: int = DEFAULT_DIRECTIONS,
    refinement: int = REFINEMENT_FACTOR,
    exchange_rounds: int = EXCHANGE_ROUNDS,
    lawson_iterations: int = LAWSON_ITERATIONS,
) -> MinimaxResult:
    """Chebyshev polynomial of a discretized set by linear programming.

    Solves min ε subject to Re(e^{iθ_ℓ}·T(z_j)) ≤ ε over all nodes and
    directions θ_ℓ = 2πℓ/m, in an Arnoldi basis on the nodes. For
    conjugation-symmetric node sets the coefficients are real and only nodes
    with Im z ≥ 0 are constrained. Local maximizers of |T| on the refined
    grid are then added as constraints and the LP re-solved (at most
    ``exchange_rounds`` times); a Lawson polish from arclength weights is
    tried as well. M_n is the refined-grid maximum of the better polynomial.

    Args:
        boundary: Discretization of a valid system (or of a circular arc).
        n: Degree, at least 1.
        directions: m, at least 32.
        refinement: Refinement factor of the re-evaluation grid.
        exchange_rounds: Extra LP solves with added maximizers.
        lawson_iterations: Lawson steps (0 disables the polish).

    Returns:
        The MinimaxResult; under-resolution is reported in diagnostics.

    Raises:
        ChebyshevError: For bad arguments or an LP failure.
    """
    _check_degree(n, "minimax_lp")
    if directions < MIN_DIRECTIONS:
        raise ChebyshevError(
            f"need at least {MIN_DIRECTIONS} directions, got {directions}", "minimax_lp"
        )
    real = boundary.is_conjugation_symmetric()
    refined_points, _ = boundary.refined(1)
    center, scale = _frame(refined_points)
    basis = ConditionedBasis.arnoldi(center, scale, n, boundary.nodes, real=real)
    samples = refinement * boundary.nodes_per_component
    diagnostics = SolverDiagnostics(
        method="lp", relaxation_bound=1.0 / math.cos(math.pi / directions)
    )

    guard = 1e-14 * max(1.0, float(np.max(np.abs(boundary.nodes))))
    points = boundary.nodes[boundary.nodes.imag >= -guard] if real else boundary.nodes
    rows = basis.values(points)
    on_axis = np.abs(points.imag) <= guard
    coefficients, epsilon = _solve_lp(rows, directions, real, on_axis)
    diagnostics.iterations = 1
    sup, maximizers = _refined_maximum(basis, coefficients, boundary.components, samples)
    for _ in range(exchange_rounds):
        on_points = float(np.max(np.abs(rows @ np.append(coefficients, 1.0))))
        if sup <= on_points * (1 + 1e-9):
            break
        added = maximizers[maximizers.imag >= -guard] if real else maximizers
        if added.size == 0:
            break
        rows = np.vstack([rows, basis.values(added)])
        on_axis = np.concatenate([on_axis, np.abs(added.imag) <= guard])
        candidate, candidate_eps = _solve_lp(rows, directions, real, on_axis)
        diagnostics.iterations += 1
        candidate_sup, candidate_max = _refined_maximum(
            basis, candidate, boundary.components, samples
        )
        if candidate_sup >= sup:
            break
        coefficients, epsilon, sup, maximizers = candidate, candidate_eps, candidate_sup, candidate_max
    diagnostics.lp_epsilon = epsilon

    if lawson_iterations > 0:
        arclength = boundary.weights * boundary.speeds
        polished = _lawson(
            basis.values(boundary.nodes), np.maximum(arclength, 1e-300), lawson_iterations, real
        )
        polished_sup, _ = _refined_maximum(basis, polished, boundary.components, samples)
        if polished_sup < sup:
            coefficients, sup = polished, polished_sup
            diagnostics.lawson_used = True

    node_max = float(np.max(np.abs(basis.normalized(coefficients, boundary.nodes))))
    if sup > node_max * (1 + _RESOLUTION_WARNING):
        excess = sup / node_max - 1 if node_max > 0 else math.inf
        message = (
            f"under-resolved boundary: refined maximum exceeds the node maximum by "
            f"{excess:.2%} at n={n}"
        )
        diagnostics.warnings.append(message)
        logger.warning(message)
    diagnostics.gap = sup / epsilon - 1 if epsilon > 0 else 0.0

    refined_samples, _ = boundary.refined(refinement)
    values = basis.normalized(coefficients, refined_samples)
    keep = np.abs(values) >= (1 - _EXTREME_BAND) * sup
    log_m = basis.log_leading + math.log(sup)
    logger.debug(
        "lp n=%d: M_n=%.12g solves=%d lawson=%s",
        n,
        math.exp(log_m),
        diagnostics.iterations,
        diagnostics.lawson_used,
    )
    return MinimaxResult(
        degree=n,
        cheb_number=math.exp(log_m),
        log_cheb_number=log_m,
        basis=basis,
        coefficients=np.asarray(coefficients),
        extreme_points=refined_samples[keep],
        extreme_signs=np.zeros(int(keep.sum())),
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Circular arcs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CircularArc(OpenArc):
    """The unit-circle arc {e^{iφ}: |φ| ≤ half_angle}.

    Parametrized as φ = half_angle·cos θ, θ ∈ [0, π], so the endpoint
    singularity of the equilibrium density is absorbed as on intervals.
    Arcs are a verification path only; systems do not accept them.
    """

    half_angle: float

    is_arc = True

    @property
    def real_extent(self) -> tuple[float, float]:
        return (math.cos(self.half_angle), 1.0)

    def point(self, param: np.ndarray) -> np.ndarray:
        return np.exp(1j * self.half_angle * np.cos(param))

    def speed(self, param: np.ndarray) -> np.ndarray:
        return self.half_angle * np.abs(np.sin(param))


def arc_boundary(half_angle: float, nodes: int = DEFAULT_NODES_PER_COMPONENT) -> DiscretizedBoundary:
    """Discretize the circular arc of the given half central angle."""
    if not 0 < half_angle < math.pi:
        raise ChebyshevError(f"half angle must lie in (0, π), got {half_angle}", "arc_boundary")
    return discretize_components([CircularArc(half_angle)], nodes)


def arc_capacity(half_angle: float) -> float:
    """Capacity sin(α/2) of the arc |φ| ≤ α of the unit circle."""
    return math.sin(0.5 * half_angle)


# ---------------------------------------------------------------------------
# Widom ratios
# ---------------------------------------------------------------------------


def minimax(
    system: CompactSystem,
    n: int,
    solver: str = "auto",
    nodes_per_component: int = DEFAULT_NODES_PER_COMPONENT,
    directions: int = DEFAULT_DIRECTIONS,
) -> MinimaxResult:
    """Solve for T_n on a validated system with the chosen solver.

    Args:
        system: The compact set.
        n: Degree.
        solver: 'auto' (Remez on all-interval sets, LP otherwise), 'remez' or 'lp'.
        nodes_per_component: LP discretization size.
        directions: LP direction count.

    Raises:
        ChebyshevError: For an unknown solver or solver failures.
        GeometryError: For invalid systems.
    """
    require_valid(system, "minimax")
    if solver == "auto":
        solver = "remez" if system.all_intervals else "lp"
    if solver == "remez":
        return remez_real(system, n)
    if solver == "lp":
        return minimax_lp(discretize(system, nodes_per_component), n, directions)
    raise ChebyshevError(f"unknown solver {solver!r} (auto, remez or lp)", "minimax")


def log_widom_ratio(result: MinimaxResult, capacity: float) -> float:
    """log(M_n / C(E)^n) = log M_n − n·log C(E)."""
    return result.log_cheb_number - result.degree * math.log(capacity)


def widom_ratio(
    system: CompactSystem,
    n: int,
    solver: str = "auto",
    capacity: float | None = None,
    nodes_per_component: int = DEFAULT_NODES_PER_COMPONENT,
    directions: int = DEFAULT_DIRECTIONS,
) -> float:
    """Widom ratio M_n / C(E)^n, computed in log space.

    Args:
        system: The compact set.
        n: Degree.
        solver: 'auto', 'remez' or 'lp'.
        capacity: Precomputed C(E); solved for when omitted.
        nodes_per_component: Discretization size (capacity and LP).
        directions: LP direction count.

    Returns:
        The ratio, at least 1 up to solver tolerance.
    """
    result = minimax(system, n, solver, nodes_per_component, directions)
    if capacity is None:
        capacity = solve_equilibrium(discretize(system, nodes_per_component)).capacity
    return math.exp(log_widom_ratio(result, capacity))


def arc_widom_ratio(
    half_angle: float,
    n: int,
    nodes: int = DEFAULT_NODES_PER_COMPONENT,
    directions: int = DEFAULT_DIRECTIONS,
) -> float:
    """Widom ratio of the circular arc, against its closed-form capacity."""
    result = minimax_lp(arc_boundary(half_angle, nodes), n, directions)
    return math.exp(log_widom_ratio(result, arc_capacity(half_angle)))

