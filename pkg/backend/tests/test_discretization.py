"""
Unit Tests for Discretization
"""

import sys
import os

import numpy as np
import pytest

# Add project root to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from backend.algorithms.discretization import (
    build_grid, density_curve, discretized_expected_payoff, grid_rows, strike_index,
    truncated_quadrature_payoff,
)
from backend.algorithms.market_models import analytic_expected_payoff
from backend.models.errors import DomainError, ResourceLimitError
from backend.models.grid import AssetGrid
from backend.models.market import GbmParams


@pytest.fixture
def baseline():
    return GbmParams(2.0, 0.07, 0.3, 1.0, 0.07)


@pytest.fixture
def wide():
    return GbmParams(3.0, 0.07, 0.5, 1.0, 0.07)


class TestBuildGrid:
    """Test grid construction"""

    def test_baseline_bounds(self, baseline):
        """Three standard deviations either side of the mean"""
        grid = build_grid(baseline, 8, 1)
        assert grid.s_min == pytest.approx(2.145016 - 3 * 0.658259, abs=1e-4)
        assert grid.s_max == pytest.approx(2.145016 + 3 * 0.658259, abs=1e-4)
        assert grid.size == 8

    def test_probabilities_normalized(self, baseline):
        for d, n in [(2, 1), (3, 2), (8, 1), (4, 3)]:
            grid = build_grid(baseline, d, n)
            assert grid.probs.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(grid.probs >= 0)

    def test_lower_bound_clamped_at_zero(self, wide):
        """A wide truncation would go negative; the grid starts at 0 instead"""
        grid = build_grid(wide, 4, 1, trunc_sigmas=5.0)
        assert grid.s_min == 0.0
        assert grid.points[0] > 0

    def test_grid_depends_only_on_size(self, baseline):
        """8 points per qudit over two qudits samples the same cells as one 64-level qudit"""
        assert np.allclose(build_grid(baseline, 8, 2).points, build_grid(baseline, 64, 1).points)

    def test_invalid_arguments(self, baseline):
        with pytest.raises(DomainError):
            build_grid(baseline, 1, 1)
        with pytest.raises(DomainError):
            build_grid(baseline, 4, 0)
        with pytest.raises(DomainError):
            build_grid(baseline, 4, 1, trunc_sigmas=0.0)
        with pytest.raises(ResourceLimitError):
            build_grid(baseline, 2, 13)


class TestStrikeIndex:
    """Test the strike to register-integer map"""

    def test_baseline_strike(self, baseline):
        grid = build_grid(baseline, 8, 1)
        assert strike_index(grid, 1.7) == 3

    def test_cell_boundary_rounds_up(self, baseline):
        grid = build_grid(baseline, 8, 1)
        assert strike_index(grid, grid.s_min + 3 * grid.omega) == 3
        assert strike_index(grid, grid.s_min + 2.999 * grid.omega) == 2

    def test_domain_edges(self, baseline):
        grid = build_grid(baseline, 8, 1)
        assert strike_index(grid, grid.s_min) == 0
        assert strike_index(grid, grid.s_max) == 7

    def test_out_of_range(self, baseline):
        grid = build_grid(baseline, 8, 1)
        with pytest.raises(DomainError):
            strike_index(grid, 0.05)
        with pytest.raises(DomainError):
            strike_index(grid, 10.0)
        assert strike_index(grid, 0.05, clamp=True) == 0
        assert strike_index(grid, 10.0, clamp=True) == 7


class TestDiscretizedPayoff:
    """Test the finite-register classical benchmark"""

    def test_matches_manual_sum(self, baseline):
        grid = build_grid(baseline, 4, 1)
        manual = sum(p * max(0.0, s - 1.7) for s, p in zip(grid.points, grid.probs))
        assert discretized_expected_payoff(grid, 1.7) == pytest.approx(manual, abs=1e-14)

    def test_refinement_approaches_quadrature(self, baseline):
        """Finer grids approach the truncated-domain integral"""
        def error(d):
            grid = build_grid(baseline, d, 1)
            return abs(discretized_expected_payoff(grid, 1.7) - truncated_quadrature_payoff(grid, baseline, 1.7))
        errors = [error(d) for d in (2, 4, 8, 16, 32, 64)]
        assert all(finer < coarser for coarser, finer in zip(errors, errors[1:])), errors

    def test_uniform_weight_rescaling(self, baseline):
        """Scaling every density weight by one constant changes nothing"""
        grid = build_grid(baseline, 8, 1)
        for factor in (1e-6, 0.37, 250.0):
            scaled = AssetGrid(grid.s_min, grid.s_max, grid.d, grid.n, grid.probs * factor)
            assert np.allclose(scaled.probs, grid.probs, rtol=0, atol=1e-15)
            assert discretized_expected_payoff(scaled, 1.7) == pytest.approx(
                discretized_expected_payoff(grid, 1.7), abs=1e-14)

    def test_baseline_gap_shrinks(self, baseline):
        """At d = 8 the discretized value is closer to the analytic one than at any d <= 4"""
        analytic = analytic_expected_payoff(baseline, 1.7)
        gaps = {d: abs(discretized_expected_payoff(build_grid(baseline, d, 1), 1.7) - analytic)
                for d in range(2, 9)}
        assert all(gaps[8] < gaps[d] for d in (2, 3, 4))
        assert gaps[8] < 0.03

    def test_wide_gap_larger_than_baseline(self, baseline, wide):
        """The wider distribution keeps a larger analytic gap at matching d"""
        baseline_gap = abs(discretized_expected_payoff(build_grid(baseline, 8, 1), 1.7)
                       - analytic_expected_payoff(baseline, 1.7))
        wide_gap = abs(discretized_expected_payoff(build_grid(wide, 8, 1), 2.2)
                   - analytic_expected_payoff(wide, 2.2))
        assert wide_gap > baseline_gap


class TestExportRows:
    """Test grid and density rows"""

    def test_grid_rows(self, baseline):
        rows = grid_rows(build_grid(baseline, 8, 1))
        assert len(rows) == 8
        assert [r[0] for r in rows] == list(range(8))
        assert sum(r[2] for r in rows) == pytest.approx(1.0, abs=1e-12)

    def test_density_curve_increasing(self, baseline):
        grid = build_grid(baseline, 8, 1)
        rows = density_curve(baseline, grid.s_min, grid.s_max, samples=400)
        assert len(rows) == 400
        prices = [r[0] for r in rows]
        assert all(a < b for a, b in zip(prices, prices[1:]))
        assert all(r[1] >= 0 for r in rows)

    def test_density_curve_from_zero(self, wide):
        """A zero lower bound is nudged inside the density's domain"""
        rows = density_curve(wide, 0.0, 10.0, samples=50)
        assert rows[0][0] > 0

    def test_density_curve_samples(self, baseline):
        with pytest.raises(DomainError):
            density_curve(baseline, 1.0, 2.0, samples=1)
