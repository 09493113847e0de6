"""
Discretization
Truncate the terminal price distribution onto a d^n-point grid and map strikes to register integers
"""

import logging
import math

import numpy as np

from backend.algorithms.market_models import (
    gbm_moments, lognormal_pdf, payoff_call, truncated_expected_payoff,
)
from backend.models.errors import DomainError, ResourceLimitError
from backend.models.grid import AssetGrid
from backend.models.register import MAX_TOTAL_DIM

logger = logging.getLogger(__name__)

MAX_GRID_POINTS = MAX_TOTAL_DIM

# Cell-fraction slack so strikes landing exactly on a cell boundary round up despite float noise
_TIE_TOLERANCE = 1e-9


def build_grid(params, d, n, trunc_sigmas=3.0, max_points=MAX_GRID_POINTS):
    """
    Truncate to [max(0, mu - k sd), mu + k sd] at maturity and sample d^n cell centres.

    Args:
        params (GbmParams): Model parameters
        d (int): Qudit dimension, at least 2
        n (int): Qudit count, at least 1
        trunc_sigmas (float): Half-width k in standard deviations (default: 3)
        max_points (int): Cap on d^n

    Returns:
        AssetGrid: Grid with normalized probabilities

    Raises:
        DomainError: On bad d, n or trunc_sigmas
        ResourceLimitError: If d^n exceeds the cap
    """
    if not isinstance(d, int) or d < 2:
        raise DomainError("d must be an integer >= 2")
    if not isinstance(n, int) or n < 1:
        raise DomainError("n must be an integer >= 1")
    if trunc_sigmas <= 0:
        raise DomainError("trunc_sigmas must be positive")
    if d ** n > max_points:
        raise ResourceLimitError(f"Grid of {d}^{n} = {d ** n} points exceeds the cap of {max_points}")

    mean, sd = gbm_moments(params, params.maturity)
    s_min = max(0.0, mean - trunc_sigmas * sd)
    s_max = mean + trunc_sigmas * sd

    size = d ** n
    omega = (s_max - s_min) / size
    points = s_min + (np.arange(size) + 0.5) * omega
    weights = lognormal_pdf(points, params, params.maturity)

    grid = AssetGrid(s_min, s_max, d, n, weights)
    logger.debug("Built %s", grid)
    return grid


def strike_index(grid, strike, clamp=False):
    """
    Register integer k for a strike: round((K - s_min)/omega - 1/2) with ties rounded up,
    clamped to [0, d^n - 1].

    Args:
        grid (AssetGrid): The grid
        strike (float): Strike price K
        clamp (bool): Clamp strikes outside [s_min, s_max] instead of raising

    Returns:
        int: Strike index k

    Raises:
        DomainError: If the strike lies outside [s_min, s_max] and clamp is False
    """
    slack = _TIE_TOLERANCE * grid.omega
    if not clamp and not (grid.s_min - slack <= strike <= grid.s_max + slack):
        raise DomainError(
            f"Strike {strike} outside the grid domain [{grid.s_min}, {grid.s_max}]")
    k = math.floor((strike - grid.s_min) / grid.omega + _TIE_TOLERANCE)
    return min(max(k, 0), grid.size - 1)


def discretized_expected_payoff(grid, strike):
    """Finite-register classical benchmark sum_i p_i max(0, s_i - K)."""
    return float(np.dot(grid.probs, payoff_call(grid.points, strike)))


def truncated_quadrature_payoff(grid, params, strike):
    """Expected payoff restricted to the grid's truncation interval, by quadrature."""
    return truncated_expected_payoff(params, strike, grid.s_min, grid.s_max)


def grid_rows(grid):
    """
    Rows for the grid CSV.

    Returns:
        list: (index, s_i, p_i) per grid point
    """
    return [(i, float(s), float(p)) for i, (s, p) in enumerate(zip(grid.points, grid.probs))]


def density_curve(params, s_min, s_max, samples=400):
    """
    Dense samples of the terminal density over [s_min, s_max].

    Returns:
        list: (s, p(s)) rows with strictly increasing s
    """
    if samples < 2:
        raise DomainError("samples must be >= 2")
    lower = s_min if s_min > 0 else (s_max - s_min) / (100 * samples)
    prices = np.linspace(lower, s_max, samples)
    values = lognormal_pdf(prices, params, params.maturity)
    return [(float(s), float(p)) for s, p in zip(prices, values)]
