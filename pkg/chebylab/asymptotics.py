"""Closed-form predictions for Widom ratios and the checks built on them.

The elliptic case (one real interval plus one real-symmetric closed curve)
has an explicit limit law: with ω = ω(∞) the harmonic measure of the interval
and φ_n = {n·ω + |τ′|·ln 2/π},

    M_n / C(E)^n  ≈  2^ω · |ϑ₀((φ_n + ω)/2 | τ′) / ϑ₀((φ_n − ω)/2 | τ′)|.

Every limit point lies in [2^{ν(E_arc)}, 2^{ν(E_arc)}·exp Σ g(z_j*)].
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from chebylab.chebyshev import MinimaxResult, log_widom_ratio, minimax, minimax_lp
from chebylab.config import (
    DEFAULT_DIRECTIONS,
    DEFAULT_NODES_PER_COMPONENT,
    DEFAULT_TAIL_START,
    NEAR_WRAP_BAND,
)
from chebylab.elliptic import EllipticData, build_elliptic_data, theta0
from chebylab.errors import AsymptoticsError
from chebylab.geometry import CompactSystem, discretize, require_valid
from chebylab.potential import (
    EquilibriumSolution,
    GreenData,
    condenser_modulus,
    solve_equilibrium,
)

logger = logging.getLogger(__name__)

# Default lower margin β above 1 required of mixed-set tails.
DEFAULT_BETA_FLOOR = 0.01
# Upper margin below 2 when no elliptic prediction is available.
DEFAULT_THETA_MARGIN = 0.01
# Phase-circle resolution for prediction extremes.
_PHASE_SAMPLES = 4096


# ---------------------------------------------------------------------------
# Elliptic prediction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipticPrediction:
    """Predicted Widom ratio at degree n.

    Attributes:
        n: Degree (0 gives the class-0 constant).
        phase: {n·ω(∞) + |τ′|·ln2/π} in [0, 1).
        predicted_ratio: The theta-quotient prediction.
        near_wrap: The raw phase was within NEAR_WRAP_BAND of an integer.
        data: The EllipticData the prediction was computed from.
    """

    n: int
    phase: float
    predicted_ratio: float
    near_wrap: bool
    data: EllipticData


def wrapped_phase(raw: float) -> tuple[float, bool]:
    """Fractional part with the near-integer guard band.

    Returns:
        (phase in [0, 1), near-wrap flag).
    """
    phase = raw - math.floor(raw)
    if phase < NEAR_WRAP_BAND or 1.0 - phase < NEAR_WRAP_BAND:
        return 0.0, True
    return phase, False


def predicted_ratio(phase: float | np.ndarray, omega: float, abs_tau_prime: float):
    """2^ω·|ϑ₀((φ+ω)/2)/ϑ₀((φ−ω)/2)| for any ω in [0, 1], vectorized over φ."""
    upper = theta0((np.asarray(phase) + omega) / 2, abs_tau_prime)
    lower = theta0((np.asarray(phase) - omega) / 2, abs_tau_prime)
    return 2.0**omega * np.abs(upper / lower)


def predict_elliptic(ed: EllipticData, n: int) -> EllipticPrediction:
    """Evaluate the elliptic limit law at degree n.

    Args:
        ed: Elliptic data of the system.
        n: Degree, at least 0.

    Raises:
        AsymptoticsError: For a negative degree.
    """
    if n < 0:
        raise AsymptoticsError(f"degree must be non-negative, got {n}", "predict_elliptic")
    raw = n * ed.omega_infinity + ed.abs_tau_prime * math.log(2.0) / math.pi
    phase, near_wrap = wrapped_phase(raw)
    ratio = float(predicted_ratio(phase, ed.omega_infinity, ed.abs_tau_prime))
    return EllipticPrediction(n=n, phase=phase, predicted_ratio=ratio, near_wrap=near_wrap, data=ed)


def prediction_extremes(ed: EllipticData, samples: int = _PHASE_SAMPLES) -> tuple[float, float]:
    """Min and max of the predicted ratio over the phase circle.

    The max is the elliptic-case value of the constant θ < 2 bounding every
    limsup.
    """
    phases = np.arange(samples) / samples
    ratios = predicted_ratio(phases, ed.omega_infinity, ed.abs_tau_prime)
    return float(ratios.min()), float(ratios.max())


def elliptic_floor(ed: EllipticData, samples: int = _PHASE_SAMPLES) -> float:
    """2^ω·min ϑ₀ / max ϑ₀ over the phase circle, a positive floor of the prediction."""
    values = theta0(np.arange(samples) / samples, ed.abs_tau_prime)
    return float(2.0**ed.omega_infinity * values.min() / values.max())


def thiran_detaille_constant(half_angle: float) -> float:
    """Limit Widom ratio 2cos²(α/4) of the circular arc |φ| ≤ α."""
    return 2.0 * math.cos(0.25 * half_angle) ** 2


def elliptic_data_for(
    system: CompactSystem,
    nodes_per_component: int = DEFAULT_NODES_PER_COMPONENT,
    solution: EquilibriumSolution | None = None,
) -> EllipticData:
    """EllipticData of an interval-plus-curve system.

    ω(∞) is the equilibrium mass of the interval; mod(Ω) comes from the
    condenser solve.

    Raises:
        AsymptoticsError: When the system is not one interval plus one curve.
    """
    _require_elliptic(system, "elliptic_data_for")
    if solution is None:
        solution = solve_equilibrium(discretize(system, nodes_per_component))
    omega = solution.component_mass[system.arc_indices[0]]
    condenser = condenser_modulus(system, nodes_per_component)
    return build_elliptic_data(condenser.modulus, omega)


def _require_elliptic(system: CompactSystem, operation: str) -> None:
    if system.p != 2 or len(system.arc_indices) != 1:
        raise AsymptoticsError(
            "the elliptic law needs exactly one real interval and one closed curve, "
            f"got {system.describe()}",
            operation,
        )


# ---------------------------------------------------------------------------
# Limit-point interval
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WidomInterval:
    """[2^{ν(E_arc)}, 2^{ν(E_arc)}·exp Σ g(z_j*)], the home of every limit point."""

    lower: float
    upper: float
    arc_mass: float
    critical_sum: float

    def contains(self, ratio: float, lower_tol: float = 0.0, upper_tol: float = 0.0) -> bool:
        """Containment with relative slack at either end."""
        return self.lower * (1 - lower_tol) <= ratio <= self.upper * (1 + upper_tol)


def interval_bounds(sol: EquilibriumSolution, gd: GreenData) -> WidomInterval:
    """Evaluate the limit-point interval from solver outputs.

    Args:
        sol: Equilibrium solution (supplies ν(E_arc)).
        gd: Green's data with critical points located.
    """
    lower = 2.0**sol.arc_mass
    return WidomInterval(
        lower=lower,
        upper=lower * math.exp(gd.critical_sum),
        arc_mass=sol.arc_mass,
        critical_sum=gd.critical_sum,
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    """One degree of a Widom-ratio sweep."""

    n: int
    result: MinimaxResult
    ratio: float


def widom_sweep(
    system: CompactSystem,
    degrees: Iterable[int],
    capacity: float,
    solver: str = "auto",
    nodes_per_component: int = DEFAULT_NODES_PER_COMPONENT,
    directions: int = DEFAULT_DIRECTIONS,
    jobs: int = 1,
) -> list[SweepPoint]:
    """Solve for T_n over a degree range, in parallel when jobs > 1.

    Degrees are independent solves; results are joined and returned ordered
    by n regardless of completion order.
    """
    require_valid(system, "widom_sweep")
    degrees = sorted(set(degrees))
    if solver == "lp" or (solver == "auto" and not system.all_intervals):
        boundary = discretize(system, nodes_per_component)

        def solve(n: int) -> MinimaxResult:
            return minimax_lp(boundary, n, directions)

    else:

        def solve(n: int) -> MinimaxResult:
            return minimax(system, n, solver, nodes_per_component, directions)

    def point(n: int) -> SweepPoint:
        result = solve(n)
        ratio = math.exp(log_widom_ratio(result, capacity))
        logger.info("n=%d: M_n=%.12g ratio=%.9f", n, result.cheb_number, ratio)
        return SweepPoint(n=n, result=result, ratio=ratio)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(point, degrees))
    else:
        points = [point(n) for n in degrees]
    return sorted(points, key=lambda p: p.n)


# ---------------------------------------------------------------------------
# Mixed-set bounds
# ---------------------------------------------------------------------------


@dataclass
class Theorem1Report:
    """Outcome of the θ < 2 and 1 + β checks on a sweep tail.

    Attributes:
        skipped: The system does not meet the hypotheses.
        reason: Why the check was skipped (empty otherwise).
        tail_start: First degree of the tail.
        tail_max: Largest tail ratio.
        tail_min: Smallest tail ratio.
        margin: Required distance below 2.
        beta: tail_min − 1, the reported β.
        beta_floor: Required β (0 for all-curve systems).
        upper_ok: tail_max < 2 − margin.
        lower_ok: tail_min > 1 + beta_floor (≥ 1 for all-curve systems).
    """

    skipped: bool = False
    reason: str = ""
    tail_start: int = DEFAULT_TAIL_START
    tail_max: float = float("nan")
    tail_min: float = float("nan")
    margin: float = DEFAULT_THETA_MARGIN
    beta: float = float("nan")
    beta_floor: float = DEFAULT_BETA_FLOOR
    upper_ok: bool = False
    lower_ok: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.skipped or (self.upper_ok and self.lower_ok)


def check_theorem1(
    system: CompactSystem,
    ratios: Mapping[int, float],
    tail_start: int = DEFAULT_TAIL_START,
    elliptic: EllipticData | None = None,
    beta_floor: float = DEFAULT_BETA_FLOOR,
) -> Theorem1Report:
    """Check that tail Widom ratios of a set with a curve stay in (1 + β, 2).

    Args:
        system: The compact set.
        ratios: Widom ratio per degree.
        tail_start: First degree of the tail.
        elliptic: When given, the upper margin is ½(2 − max prediction).
        beta_floor: Required β for sets with an interval component.

    Returns:
        The report; nothing is raised.
    """
    report = Theorem1Report(tail_start=tail_start, beta_floor=beta_floor)
    if not system.curve_indices:
        report.skipped = True
        report.reason = "no closed-curve component: the ratio tends to 2 or above on real sets"
        return report
    tail = [ratio for n, ratio in ratios.items() if n >= tail_start]
    if not tail:
        report.skipped = True
        report.reason = f"no ratios at n ≥ {tail_start}"
        return report

    if elliptic is not None:
        _, theta = prediction_extremes(elliptic)
        report.margin = 0.5 * (2.0 - theta)
        report.notes.append(f"elliptic θ = {theta:.9f}")
    report.tail_max, report.tail_min = max(tail), min(tail)
    report.beta = report.tail_min - 1.0
    report.upper_ok = report.tail_max < 2.0 - report.margin
    if system.arc_indices:
        report.lower_ok = report.tail_min > 1.0 + beta_floor
    else:
        report.beta_floor = 0.0
        report.lower_ok = report.tail_min >= 1.0 - 1e-9
        report.notes.append("all-curve system: lower check is ratio ≥ 1")
    return report


# ---------------------------------------------------------------------------
# Computed vs predicted
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    phase: float
    computed_ratio: float
    predicted_ratio: float
    rel_dev: float
    near_wrap: bool


@dataclass(frozen=True)
class ComparisonTable:
    """Per-degree computed vs predicted ratios plus tail statistics.

    Near-wrap rows are reported but excluded from both statistics.
    """

    rows: tuple[ComparisonRow, ...]
    data: EllipticData
    capacity: float
    tail_start: int

    @property
    def tail(self) -> list[ComparisonRow]:
        return [r for r in self.rows if r.n >= self.tail_start and not r.near_wrap]

    @property
    def max_tail_deviation(self) -> float:
        tail = self.tail
        return max(r.rel_dev for r in tail) if tail else float("nan")

    @property
    def correlation(self) -> float:
        """Pearson correlation of computed and predicted tail sequences."""
        tail = self.tail
        if len(tail) < 2:
            return float("nan")
        computed = np.array([r.computed_ratio for r in tail])
        predicted = np.array([r.predicted_ratio for r in tail])
        if computed.std() == 0 or predicted.std() == 0:
            return float("nan")
        return float(np.corrcoef(computed, predicted)[0, 1])


def compare_prediction(
    system: CompactSystem,
    degrees: Iterable[int],
    nodes_per_component: int = DEFAULT_NODES_PER_COMPONENT,
    directions: int = DEFAULT_DIRECTIONS,
    jobs: int = 1,
    tail_start: int = DEFAULT_TAIL_START,
) -> ComparisonTable:
    """Compare LP-computed Widom ratios with the elliptic limit law.

    Args:
        system: One real interval plus one real-symmetric closed curve.
        degrees: Degrees to solve.
        nodes_per_component: Discretization size for every solver.
        directions: LP direction count.
        jobs: Parallel degree solves.
        tail_start: First degree counted by the tail statistics.

    Raises:
        AsymptoticsError: When the system is not of elliptic type.
    """
    require_valid(system, "compare_prediction")
    _require_elliptic(system, "compare_prediction")
    solution = solve_equilibrium(discretize(system, nodes_per_component))
    data = elliptic_data_for(system, nodes_per_component, solution)
    logger.info(
        "elliptic data: mod=%.12g omega=%.12g |tau'|=%.12g h=%.6g",
        data.modulus_omega,
        data.omega_infinity,
        data.abs_tau_prime,
        data.nome_h,
    )
    sweep = widom_sweep(
        system, degrees, solution.capacity, "lp", nodes_per_component, directions, jobs
    )
    rows = []
    for point in sweep:
        prediction = predict_elliptic(data, point.n)
        rows.append(
            ComparisonRow(
                n=point.n,
                phase=prediction.phase,
                computed_ratio=point.ratio,
                predicted_ratio=prediction.predicted_ratio,
                rel_dev=abs(point.ratio / prediction.predicted_ratio - 1.0),
                near_wrap=prediction.near_wrap,
            )
        )
    return ComparisonTable(
        rows=tuple(rows), data=data, capacity=solution.capacity, tail_start=tail_start
    )
