"""Tests for equilibrium measures, Green's functions and condenser moduli."""

from __future__ import annotations

import math

import numpy as np
import pytest

from chebylab.elliptic import elliptic_periods
from chebylab.errors import PotentialError
from chebylab.geometry import Circle, CompactSystem, Ellipse, Interval, discretize
from chebylab.potential import (
    component_masses,
    condenser_modulus,
    critical_points,
    fekete_capacity,
    greens_function,
    harmonic_measure_at_infinity,
    harmonic_measures,
    meets_capacity_bound,
    potential_deviation,
    solve_equilibrium,
)


def _solve(system: CompactSystem, nodes: int = 512):
    return solve_equilibrium(discretize(system, nodes))


class TestSolveEquilibrium:
    """Tests for solve_equilibrium()."""

    def test_interval_capacity_is_one_half(self, unit_interval: CompactSystem) -> None:
        """Should give C([−1, 1]) = 1/2."""
        assert _solve(unit_interval).capacity == pytest.approx(0.5, rel=1e-6)

    def test_circle_capacity_is_its_radius(self, unit_circle: CompactSystem) -> None:
        """Should give C(unit circle) = 1."""
        assert _solve(unit_circle).capacity == pytest.approx(1.0, rel=1e-6)

    def test_symmetric_two_intervals_capacity(self, two_intervals: CompactSystem) -> None:
        """Should give √(1 − a²)/2 for [−1, −a] ∪ [a, 1]."""
        assert _solve(two_intervals).capacity == pytest.approx(math.sqrt(0.75) / 2, rel=1e-4)

    def test_ellipse_capacity(self) -> None:
        """Should give (a + b)/2 for an ellipse."""
        system = CompactSystem((Ellipse(0.0, 2.0, 1.0),))
        assert _solve(system, 256).capacity == pytest.approx(1.5, rel=1e-5)

    def test_mass_conservation(self, elliptic_system: CompactSystem) -> None:
        """Should give node masses summing to one."""
        sol = _solve(elliptic_system, 256)
        assert sol.mu_weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert sum(sol.component_mass) == pytest.approx(1.0, abs=1e-12)

    def test_capacity_scaling_law(self, elliptic_system: CompactSystem) -> None:
        """Should give C(λE + c) = λ·C(E)."""
        base = _solve(elliptic_system, 256).capacity
        moved = _solve(elliptic_system.affine(3.0, -2.0), 256).capacity
        assert moved == pytest.approx(3.0 * base, rel=1e-6)

    def test_weights_are_mirror_symmetric(self, two_intervals: CompactSystem) -> None:
        """Should give equal masses at mirrored nodes of a symmetric set."""
        sol = _solve(two_intervals, 128)
        left = sol.mu_weights[:128]
        right = sol.mu_weights[128:]
        np.testing.assert_allclose(left, right[::-1], atol=1e-10)

    def test_potential_is_constant_on_the_set(self, elliptic_system: CompactSystem) -> None:
        """Should keep the off-node potential within ε(N) of the Robin constant."""
        coarse = potential_deviation(_solve(elliptic_system, 32))
        fine = potential_deviation(_solve(elliptic_system, 128))
        assert fine < coarse
        assert fine < 2e-2


class TestComponentMasses:
    """Tests for component_masses() and the harmonic-measure cross-check."""

    def test_single_interval_is_all_arc(self, unit_interval: CompactSystem) -> None:
        """Should put the whole mass on E_arc."""
        masses, arc = component_masses(_solve(unit_interval, 64))
        assert masses == [pytest.approx(1.0)]
        assert arc == pytest.approx(1.0)

    def test_circle_has_no_arc_mass(self, unit_circle: CompactSystem) -> None:
        """Should give ν(E_arc) = 0 for a closed curve."""
        _, arc = component_masses(_solve(unit_circle, 64))
        assert arc == 0.0

    def test_symmetric_intervals_split_evenly(self, two_intervals: CompactSystem) -> None:
        """Should give mass 1/2 to each mirrored interval."""
        masses, _ = component_masses(_solve(two_intervals, 256))
        assert masses == [pytest.approx(0.5, abs=1e-12), pytest.approx(0.5, abs=1e-12)]

    def test_masses_match_harmonic_measure(self, elliptic_system: CompactSystem) -> None:
        """Should agree with the Dirichlet route within 1e−3."""
        masses, _ = component_masses(_solve(elliptic_system, 256))
        for k in range(2):
            omega = harmonic_measure_at_infinity(elliptic_system, k, 256)
            assert omega == pytest.approx(masses[k], abs=1e-3)

    def test_harmonic_measures_sum_to_one(self, elliptic_system: CompactSystem) -> None:
        """Should give ω_1(∞) + ω_2(∞) = 1."""
        measures = harmonic_measures(discretize(elliptic_system, 128))
        assert sum(measures) == pytest.approx(1.0, abs=1e-9)

    def test_bad_component_index_refused(self, unit_interval: CompactSystem) -> None:
        """Should refuse an index outside 0..p−1."""
        with pytest.raises(PotentialError, match="out of range"):
            harmonic_measure_at_infinity(unit_interval, 1, 32)


class TestGreensFunction:
    """Tests for greens_function()."""

    def test_interval_closed_form(self, unit_interval: CompactSystem) -> None:
        """Should give g(2) = log(2 + √3) for [−1, 1]."""
        green = greens_function(_solve(unit_interval))
        assert green(2.0) == pytest.approx(math.log(2 + math.sqrt(3)), abs=1e-4)

    def test_circle_closed_form(self, unit_circle: CompactSystem) -> None:
        """Should give g(z) = log|z| outside the unit disk."""
        green = greens_function(_solve(unit_circle))
        assert green(2.0) == pytest.approx(math.log(2.0), abs=1e-6)
        assert green(-1.5 + 1.5j) == pytest.approx(math.log(abs(-1.5 + 1.5j)), abs=1e-6)

    def test_normalization_at_infinity(self, elliptic_system: CompactSystem) -> None:
        """Should give g(z) − log|z| → −log C(E)."""
        sol = _solve(elliptic_system, 256)
        green = greens_function(sol)
        assert green(1e6) - math.log(1e6) == pytest.approx(-math.log(sol.capacity), abs=1e-5)

    def test_positive_off_the_set(self, elliptic_system: CompactSystem) -> None:
        """Should be positive in the gap and away from E."""
        green = greens_function(_solve(elliptic_system, 256))
        assert np.all(green(np.array([0.2, 3.0, 0.5j])) > 0)

    def test_vanishes_on_the_set(self, unit_interval: CompactSystem) -> None:
        """Should be ≈ 0 at off-node points of E."""
        green = greens_function(_solve(unit_interval, 256))
        assert abs(green(0.3)) < 1e-2

    def test_undefined_on_nodes(self, unit_interval: CompactSystem) -> None:
        """Should refuse evaluation on a boundary node."""
        sol = _solve(unit_interval, 32)
        with pytest.raises(PotentialError, match="undefined"):
            greens_function(sol)(sol.boundary.nodes[3])


class TestCriticalPoints:
    """Tests for critical_points()."""

    def test_symmetric_gap_has_critical_point_at_zero(self, two_intervals: CompactSystem) -> None:
        """Should find z* = 0 with g(0) > 0 for [−1, −a] ∪ [a, 1]."""
        green = greens_function(_solve(two_intervals, 256), two_intervals)
        (point,) = green.critical_points
        assert point.z == pytest.approx(0.0, abs=1e-8)
        assert point.g > 0
        assert green.critical_sum == pytest.approx(point.g)

    def test_interval_and_circle(self, elliptic_system: CompactSystem) -> None:
        """Should find one critical point inside (−0.2, 0.7)."""
        sol = _solve(elliptic_system, 256)
        (point,) = critical_points(greens_function(sol), elliptic_system)
        assert -0.2 < point.z < 0.7
        assert point.g > 0

    @pytest.mark.parametrize("nodes", [128, 512])
    def test_mixed_set_through_greens_function(self, elliptic_system: CompactSystem, nodes: int) -> None:
        """Should locate the gap's critical point when building g for the mixed set."""
        green = greens_function(_solve(elliptic_system, nodes), elliptic_system)
        (point,) = green.critical_points
        assert -0.2 < point.z < 0.7
        assert green.critical_sum > 0

    def test_single_component_has_none(self, unit_interval: CompactSystem) -> None:
        """Should return an empty list when p = 1."""
        assert critical_points(greens_function(_solve(unit_interval, 32)), unit_interval) == []


class TestCondenserModulus:
    """Tests for condenser_modulus()."""

    def test_concentric_circles_calibration(self) -> None:
        """Should give (1/2π)·ln(r2/r1) = 1 for radii 1 and e^{2π}."""
        system = CompactSystem((Circle(0.0, 1.0), Circle(0.0, math.exp(2 * math.pi))))
        data = condenser_modulus(system, 128)
        assert data.modulus == pytest.approx(1.0, rel=1e-6)
        assert data.cap == pytest.approx(1.0 / data.modulus)

    def test_two_intervals_match_elliptic_periods(self, two_intervals: CompactSystem) -> None:
        """Should agree with K/(2K′) within 1e−3."""
        gap, band = elliptic_periods((-1.0, -0.5, 0.5, 1.0))
        assert condenser_modulus(two_intervals, 512).modulus == pytest.approx(
            gap / (2 * band), rel=1e-3
        )

    def test_interval_and_circle_modulus_positive(self, elliptic_system: CompactSystem) -> None:
        """Should give a positive modulus for the mixed set."""
        assert condenser_modulus(elliptic_system, 128).modulus > 0

    def test_refuses_other_component_counts(self, unit_interval: CompactSystem) -> None:
        """Should refuse p ≠ 2."""
        with pytest.raises(PotentialError, match="exactly two"):
            condenser_modulus(unit_interval, 32)


class TestCapacityOracles:
    """Tests for meets_capacity_bound() and fekete_capacity()."""

    def test_capacity_bound(self) -> None:
        """Should accept M_n = C^n and reject anything below it."""
        assert meets_capacity_bound(2 * 0.5**5, 0.5, 5)
        assert meets_capacity_bound(0.5**5, 0.5, 5)
        assert not meets_capacity_bound(0.9 * 0.5**5, 0.5, 5)

    @pytest.mark.filterwarnings("error::RuntimeWarning")
    def test_fekete_circle(self, unit_circle: CompactSystem) -> None:
        """Should give C = 1 from equispaced charges."""
        assert fekete_capacity(unit_circle, 64) == pytest.approx(1.0, rel=1e-5)

    @pytest.mark.slow
    @pytest.mark.filterwarnings("error::RuntimeWarning")
    def test_fekete_oracle_matches_collocation(self, two_intervals: CompactSystem) -> None:
        """Should agree with √(1 − a²)/2 and with the N = 512 solve within 1e−4."""
        oracle = fekete_capacity(two_intervals)
        assert oracle == pytest.approx(math.sqrt(0.75) / 2, rel=1e-4)
        assert _solve(two_intervals, 512).capacity == pytest.approx(oracle, rel=1e-4)
