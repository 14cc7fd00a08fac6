"""Tests for conditioned bases and the Remez / LP minimax solvers."""

from __future__ import annotations

import math

import numpy as np
import pytest

from chebylab.chebyshev import (
    CircularArc,
    ConditionedBasis,
    arc_boundary,
    arc_capacity,
    arc_widom_ratio,
    minimax,
    minimax_lp,
    remez_real,
    widom_ratio,
)
from chebylab.asymptotics import thiran_detaille_constant
from chebylab.errors import ChebyshevError, GeometryError
from chebylab.geometry import CompactSystem, Interval, discretize
from chebylab.potential import meets_capacity_bound, solve_equilibrium


def _leading_coefficient(values: np.ndarray, points: np.ndarray) -> complex:
    """Top divided difference of a degree-(len−1) polynomial."""
    total = 0j
    for i, x in enumerate(points):
        total += values[i] / np.prod([x - y for j, y in enumerate(points) if j != i])
    return total


class TestConditionedBasis:
    """Tests for ConditionedBasis."""

    def test_chebyshev_leading_map_gives_monic_product(self) -> None:
        """Should turn lead·T_n(s) into Π(z − z_k) over the rescaled roots."""
        n, center, scale = 7, 0.3, 2.0
        basis = ConditionedBasis.chebyshev(center, scale, n)
        roots = center + scale * np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n))
        z = np.array([0.1, -1.7, 2.9 + 0.4j, 0.5j])
        expected = np.array([np.prod(w - roots) for w in z])
        np.testing.assert_allclose(basis.monic(np.zeros(n), z), expected, rtol=1e-12)
        assert basis.kind == "chebyshev"

    def test_arnoldi_form_is_monic(self, elliptic_system: CompactSystem) -> None:
        """Should have leading coefficient one after the leading map."""
        nodes = discretize(elliptic_system, 64).nodes
        basis = ConditionedBasis.arnoldi(0.0, 1.0, 4, nodes, real=True)
        points = np.array([-0.9, -0.3, 0.2, 0.6, 1.1])
        values = basis.monic(np.array([0.3, -0.2, 0.7, 1.5]), points)
        assert _leading_coefficient(values, points) == pytest.approx(1.0, rel=1e-10)
        assert basis.kind == "arnoldi"

    def test_arnoldi_basis_is_orthonormal_on_its_nodes(self, elliptic_system: CompactSystem) -> None:
        """Should give the identity Gram matrix in the discrete inner product."""
        nodes = discretize(elliptic_system, 128).nodes
        basis = ConditionedBasis.arnoldi(0.0, 1.15, 40, nodes)
        values = basis.values(nodes)
        gram = values.conj().T @ values / nodes.size
        np.testing.assert_allclose(gram, np.eye(41), atol=1e-10)

    def test_arnoldi_keeps_digits_at_high_degree(self, elliptic_system: CompactSystem) -> None:
        """Should keep basis values bounded on the set where Chebyshev values blow up."""
        nodes = discretize(elliptic_system, 256).nodes
        arnoldi = ConditionedBasis.arnoldi(0.0, 1.15, 60, nodes, real=True)
        chebyshev = ConditionedBasis.chebyshev(0.0, 1.15, 60)
        assert np.max(np.abs(arnoldi.values(nodes))) < 1e3
        assert np.max(np.abs(chebyshev.values(nodes))) > 1e6


class TestRemezReal:
    """Tests for remez_real()."""

    def test_interval_law(self, unit_interval: CompactSystem) -> None:
        """Should reproduce M_n = 2·2^{−n} on [−1, 1] for n = 1..15."""
        for n in range(1, 16):
            result = remez_real(unit_interval, n)
            assert result.cheb_number == pytest.approx(2.0 * 2.0**-n, rel=1e-8)

    def test_interval_extrema_alternate(self, unit_interval: CompactSystem) -> None:
        """Should equioscillate at the n+1 points cos(kπ/n)."""
        n = 6
        result = remez_real(unit_interval, n)
        points = np.sort(result.extreme_points.real)
        np.testing.assert_allclose(points, np.sort(np.cos(np.arange(n + 1) * np.pi / n)), atol=1e-6)
        assert np.all(result.extreme_signs[1:] * result.extreme_signs[:-1] < 0)
        assert result.diagnostics.method == "remez"

    def test_two_intervals_degree_two(self, two_intervals: CompactSystem) -> None:
        """Should give T_2 = x² − 5/8 with M_2 = 3/8."""
        result = remez_real(two_intervals, 2)
        assert result.cheb_number == pytest.approx(0.375, rel=1e-10)
        assert result(0.0)[0].real == pytest.approx(-0.625, abs=1e-10)

    def test_polynomial_is_bounded_by_its_norm(self, two_intervals: CompactSystem) -> None:
        """Should have |T_n| ≤ M_n on a dense sample of E."""
        result = remez_real(two_intervals, 9)
        x = np.concatenate([np.linspace(-1, -0.5, 3001), np.linspace(0.5, 1, 3001)])
        assert np.max(np.abs(result(x))) <= result.cheb_number * (1 + 1e-9)

    def test_submultiplicativity(self, two_intervals: CompactSystem) -> None:
        """Should satisfy M_{n+m} ≤ M_n·M_m."""
        norms = {n: remez_real(two_intervals, n).cheb_number for n in range(1, 13)}
        for n in range(1, 7):
            for m in range(1, 7):
                assert norms[n + m] <= norms[n] * norms[m] + 1e-9

    def test_degree_22_on_symmetric_intervals(self, two_intervals: CompactSystem) -> None:
        """Should not stall when the grid exchange cycles just above 1e−12."""
        result = remez_real(two_intervals, 22)
        assert result.diagnostics.gap <= 1e-12
        assert not result.diagnostics.warnings
        assert result.cheb_number / (math.sqrt(0.75) / 2) ** 22 >= 2 - 1e-6

    def test_levelling_gap_over_acceptance_range(self, two_intervals: CompactSystem) -> None:
        """Should reach a levelling gap of 1e−12 for every n = 2..24."""
        for n in range(2, 25):
            result = remez_real(two_intervals, n)
            assert result.diagnostics.gap <= 1e-12, n
            assert len(result.extreme_points) >= n + 1, n

    def test_high_degree_asymmetric_intervals(self) -> None:
        """Should converge past grid resolution at n = 50."""
        system = CompactSystem((Interval(-1.0, -0.2), Interval(0.5, 1.0)))
        result = remez_real(system, 50)
        assert result.diagnostics.gap < 1e-10
        x = np.concatenate([np.linspace(-1, -0.2, 20001), np.linspace(0.5, 1, 20001)])
        assert np.max(np.abs(result(x))) <= result.cheb_number * (1 + 1e-9)

    def test_refuses_curves(self, elliptic_system: CompactSystem) -> None:
        """Should send sets with curves to the LP solver."""
        with pytest.raises(ChebyshevError, match="minimax_lp"):
            remez_real(elliptic_system, 3)

    @pytest.mark.parametrize("n", [0, 81])
    def test_refuses_bad_degrees(self, unit_interval: CompactSystem, n: int) -> None:
        """Should refuse degrees outside 1..80."""
        with pytest.raises(ChebyshevError, match="degree"):
            remez_real(unit_interval, n)


class TestMinimaxLp:
    """Tests for minimax_lp()."""

    def test_circle_law_low_degrees(self, unit_circle: CompactSystem) -> None:
        """Should give M_n = 1 on the unit circle."""
        boundary = discretize(unit_circle, 256)
        for n in range(1, 6):
            assert minimax_lp(boundary, n).cheb_number == pytest.approx(1.0, abs=1e-3)

    def test_interval_matches_closed_form(self, unit_interval: CompactSystem) -> None:
        """Should give M_4 = 1/8 on [−1, 1] once the endpoints are exchanged in."""
        result = minimax_lp(discretize(unit_interval, 256), 4)
        assert result.cheb_number == pytest.approx(0.125, rel=1e-6)

    def test_real_coefficients_on_symmetric_sets(self, elliptic_system: CompactSystem) -> None:
        """Should return real coefficients for conjugation-symmetric node sets."""
        result = minimax_lp(discretize(elliptic_system, 128), 6)
        assert np.isrealobj(result.coefficients) or np.max(np.abs(result.coefficients.imag)) < 1e-8
        assert result.diagnostics.relaxation_bound == pytest.approx(1 / math.cos(math.pi / 64))

    def test_respects_capacity_bound(self, elliptic_system: CompactSystem) -> None:
        """Should never report M_n below C(E)^n."""
        boundary = discretize(elliptic_system, 256)
        capacity = solve_equilibrium(boundary).capacity
        for n in (3, 8):
            assert meets_capacity_bound(minimax_lp(boundary, n).cheb_number, capacity, n)

    def test_matches_remez_on_real_sets(self, two_intervals: CompactSystem) -> None:
        """Should agree with the Remez path within 1e−3."""
        lp = minimax_lp(discretize(two_intervals, 256), 6).cheb_number
        remez = remez_real(two_intervals, 6).cheb_number
        assert lp == pytest.approx(remez, rel=1e-3)

    def test_coarse_boundary_is_flagged_under_resolved(self, unit_interval: CompactSystem) -> None:
        """Should warn when |T_n| between the nodes exceeds the node maximum by over 1e−3."""
        result = minimax_lp(
            discretize(unit_interval, 8), 7, exchange_rounds=0, lawson_iterations=0
        )
        (message,) = result.diagnostics.warnings
        assert "under-resolved" in message
        assert "n=7" in message

    def test_resolved_boundary_has_no_warning(self, unit_interval: CompactSystem) -> None:
        """Should stay quiet once the boundary resolves the polynomial."""
        assert not minimax_lp(discretize(unit_interval, 256), 4).diagnostics.warnings

    def test_grid_refinement_stability(self, elliptic_system: CompactSystem) -> None:
        """Should change M_n by less than 1e−3 when the nodes are doubled."""
        coarse = minimax_lp(discretize(elliptic_system, 256), 8).cheb_number
        fine = minimax_lp(discretize(elliptic_system, 512), 8).cheb_number
        assert fine == pytest.approx(coarse, rel=1e-3)

    def test_refuses_few_directions(self, unit_circle: CompactSystem) -> None:
        """Should refuse m < 32."""
        with pytest.raises(ChebyshevError, match="directions"):
            minimax_lp(discretize(unit_circle, 32), 2, directions=16)

    @pytest.mark.slow
    def test_circle_law_acceptance(self, unit_circle: CompactSystem) -> None:
        """Should give M_n = 1 for n = 1..30 at N = 1024, m = 64."""
        boundary = discretize(unit_circle, 1024)
        for n in range(1, 31):
            assert minimax_lp(boundary, n, directions=64).cheb_number == pytest.approx(1.0, abs=1e-3)


class TestCircularArc:
    """Tests for the circular-arc verification path."""

    def test_arc_points_lie_on_the_unit_circle(self) -> None:
        """Should sample e^{iφ} with |φ| ≤ α, endpoints included."""
        arc = CircularArc(math.pi / 2)
        params = arc.refined_parameters(8)
        np.testing.assert_allclose(np.abs(arc.point(params)), 1.0, atol=1e-15)
        assert arc.point(np.array([0.0]))[0] == pytest.approx(1j)
        assert not arc.closed and arc.is_arc

    def test_arc_boundary_is_conjugation_symmetric(self) -> None:
        """Should produce a node set closed under conjugation."""
        assert arc_boundary(math.pi / 3, 64).is_conjugation_symmetric()

    def test_arc_capacity_matches_solver(self) -> None:
        """Should agree with the collocation capacity sin(α/2)."""
        sol = solve_equilibrium(arc_boundary(math.pi / 2, 256))
        assert sol.capacity == pytest.approx(arc_capacity(math.pi / 2), rel=1e-5)

    def test_refuses_bad_angles(self) -> None:
        """Should refuse half angles outside (0, π)."""
        with pytest.raises(ChebyshevError):
            arc_boundary(0.0)

    @pytest.mark.slow
    def test_half_circle_approaches_limit_constant(self) -> None:
        """Should come within 5% of 2cos²(α/4) for n = 30..50, closing in with n."""
        half_angle = math.pi / 2
        target = thiran_detaille_constant(half_angle)
        deviations = {}
        for n in range(30, 51, 5):
            ratio = arc_widom_ratio(half_angle, n)
            deviations[n] = abs(ratio / target - 1)
            assert deviations[n] <= 0.05
        assert deviations[50] <= deviations[30]


class TestWidomRatio:
    """Tests for minimax() and widom_ratio()."""

    def test_interval_ratio_is_two(self, unit_interval: CompactSystem) -> None:
        """Should give M_n / C^n = 2 on [−1, 1]."""
        for n in range(1, 11):
            assert widom_ratio(unit_interval, n, capacity=0.5) == pytest.approx(2.0, abs=1e-9)

    def test_two_intervals_degree_two_ratio(self, two_intervals: CompactSystem) -> None:
        """Should give ratio 2 at n = 2 for [−1, −0.5] ∪ [0.5, 1]."""
        assert widom_ratio(two_intervals, 2, capacity=math.sqrt(0.75) / 2) == pytest.approx(2.0, rel=1e-9)

    def test_ratio_is_affine_invariant(self, two_intervals: CompactSystem) -> None:
        """Should give the same ratio on λE + c."""
        base = widom_ratio(two_intervals, 5)
        moved = widom_ratio(two_intervals.affine(2.0, 1.0), 5)
        assert moved == pytest.approx(base, rel=1e-6)

    def test_lp_ratio_is_affine_invariant(self, elliptic_system: CompactSystem) -> None:
        """Should give the same LP ratio on λE + c within 1e−3."""
        base = widom_ratio(elliptic_system, 6, solver="lp", nodes_per_component=128)
        moved = widom_ratio(
            elliptic_system.affine(2.0, 0.5), 6, solver="lp", nodes_per_component=128
        )
        assert moved == pytest.approx(base, rel=1e-3)

    def test_real_sets_keep_factor_two(self, two_intervals: CompactSystem) -> None:
        """Should keep every ratio at or above 2 on a real set."""
        capacity = math.sqrt(0.75) / 2
        for n in range(2, 25):
            assert widom_ratio(two_intervals, n, capacity=capacity) >= 2 - 1e-6

    def test_auto_uses_lp_for_curves(self, elliptic_system: CompactSystem) -> None:
        """Should route sets with curves to the LP solver."""
        result = minimax(elliptic_system, 3, nodes_per_component=128)
        assert result.diagnostics.method == "lp"

    def test_unknown_solver_refused(self, unit_interval: CompactSystem) -> None:
        """Should refuse solver names other than auto, remez and lp."""
        with pytest.raises(ChebyshevError, match="unknown solver"):
            minimax(unit_interval, 2, solver="simplex")

    def test_invalid_system_refused(self) -> None:
        """Should refuse overlapping components before solving."""
        system = CompactSystem((Interval(-1.0, 0.0), Interval(-0.5, 1.0)))
        with pytest.raises(GeometryError):
            widom_ratio(system, 2)
