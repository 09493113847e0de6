"""
Market Models
Classical financial mathematics for the GBM asset: density, moments, paths,
payoff, discounting, and analytic / Monte Carlo expected-payoff baselines
"""

import logging
import math

import numpy as np
from scipy import integrate, special

from backend.models.errors import DomainError
from backend.models.market import GbmParams, PricePath
from backend.utils.random_streams import make_stream

logger = logging.getLogger(__name__)


def _check_params(params):
    if not isinstance(params, GbmParams):
        raise TypeError("Must provide a GbmParams object")


def lognormal_pdf(s, params, t):
    """
    Density of S_t under geometric Brownian motion.

    p(s) = exp(-(ln(s/S0) - (alpha - sigma^2/2) t)^2 / (2 sigma^2 t)) / (s sigma sqrt(2 pi t))

    Args:
        s (float or array-like): Price(s), strictly positive
        params (GbmParams): Model parameters
        t (float): Time, strictly positive

    Returns:
        float or np.ndarray: Density value(s), same shape as `s`

    Raises:
        DomainError: If any s <= 0 or t <= 0
    """
    _check_params(params)
    if t <= 0:
        raise DomainError("t must be positive")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0):
        raise DomainError("Prices must be positive for the lognormal density")

    var = params.volatility ** 2 * t
    mu = math.log(params.s0) + (params.drift - 0.5 * params.volatility ** 2) * t
    density = np.exp(-(np.log(s_arr) - mu) ** 2 / (2 * var)) / (s_arr * math.sqrt(2 * math.pi * var))
    return float(density) if density.ndim == 0 else density


def gbm_moments(params, t):
    """
    Mean and standard deviation of S_t.

    Returns:
        tuple: (S0 e^{alpha t}, mean * sqrt(e^{sigma^2 t} - 1))
    """
    _check_params(params)
    if t <= 0:
        raise DomainError("t must be positive")
    mean = params.s0 * math.exp(params.drift * t)
    stddev = mean * math.sqrt(math.expm1(params.volatility ** 2 * t))
    return mean, stddev


def sample_terminal_prices(params, m, rng):
    """
    Exact draws of S_T.

    Args:
        params (GbmParams): Model parameters
        m (int): Number of draws
        rng: Generator or seed

    Returns:
        np.ndarray: m terminal prices

    Raises:
        DomainError: If m is not a positive integer
    """
    _check_params(params)
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise DomainError("m must be an integer >= 1")
    rng = make_stream(rng)
    T = params.maturity
    z = rng.standard_normal(m)
    log_growth = (params.drift - 0.5 * params.volatility ** 2) * T + params.volatility * math.sqrt(T) * z
    return params.s0 * np.exp(log_growth)


def sample_gbm_path(params, steps, rng):
    """
    One price path on a uniform time grid over [0, T] using exact lognormal increments.

    Args:
        params (GbmParams): Model parameters
        steps (int): Number of time steps, at least 1
        rng: Generator or seed

    Returns:
        PricePath: steps + 1 points starting at S0
    """
    _check_params(params)
    if not isinstance(steps, int) or steps < 1:
        raise DomainError("steps must be an integer >= 1")
    rng = make_stream(rng)

    times = np.linspace(0.0, params.maturity, steps + 1)
    dt = params.maturity / steps
    increments = ((params.drift - 0.5 * params.volatility ** 2) * dt
                  + params.volatility * math.sqrt(dt) * rng.standard_normal(steps))
    log_path = np.concatenate(([0.0], np.cumsum(increments)))
    prices = params.s0 * np.exp(log_path)
    prices[0] = params.s0
    return PricePath(times, prices)


def payoff_call(s, strike):
    """European call payoff max(0, s - K); works on scalars and arrays."""
    value = np.maximum(0.0, np.asarray(s, dtype=float) - strike)
    return float(value) if value.ndim == 0 else value


def discount(value, r, t):
    """Present value value * e^{-r t}."""
    return value * math.exp(-r * t)


def analytic_expected_payoff(params, strike):
    """
    Undiscounted E[max(0, S_T - K)] for the lognormal terminal price.

    Uses the forward F = S0 e^{alpha T}:
    E = F N(d1) - K N(d2), d1 = (ln(F/K) + sigma^2 T / 2) / (sigma sqrt T), d2 = d1 - sigma sqrt T.
    N is scipy.special.ndtr, accurate to double precision.

    Args:
        params (GbmParams): Model parameters
        strike (float): Strike K > 0

    Returns:
        float: Expected payoff
    """
    _check_params(params)
    if strike <= 0:
        raise DomainError("strike must be positive")
    T = params.maturity
    forward = params.s0 * math.exp(params.drift * T)
    vol = params.volatility * math.sqrt(T)
    d1 = (math.log(forward / strike) + 0.5 * vol ** 2) / vol
    d2 = d1 - vol
    return float(forward * special.ndtr(d1) - strike * special.ndtr(d2))


def discounted_fair_value(params, strike):
    """Fair value e^{-rT} E[f(S_T)]; the risk-neutral price when drift == rate."""
    return discount(analytic_expected_payoff(params, strike), params.risk_free_rate, params.maturity)


def truncated_expected_payoff(params, strike, s_min, s_max):
    """
    Expected payoff conditioned on S_T lying in [s_min, s_max], by adaptive quadrature.

    Returns:
        float: int max(0, s-K) p(s) ds / int p(s) ds over the interval
    """
    _check_params(params)
    if not s_max > s_min:
        raise DomainError("Need s_min < s_max")
    T = params.maturity
    lower = max(s_min, 1e-300)

    def density(s):
        return lognormal_pdf(s, params, T)

    # Quadrature needs the kink and the mode as breakpoints on narrow distributions
    mean, _ = gbm_moments(params, T)
    breaks = [x for x in (strike, mean) if lower < x < s_max]

    mass, _ = integrate.quad(density, lower, s_max, points=breaks or None, limit=200,
                             epsabs=1e-13, epsrel=1e-11)
    if mass <= 0:
        raise DomainError("Truncation interval carries no probability mass")

    start = max(lower, strike)
    if start >= s_max:
        return 0.0
    weighted, _ = integrate.quad(lambda s: (s - strike) * density(s), start, s_max,
                                 points=[mean] if start < mean < s_max else None,
                                 limit=200, epsabs=1e-13, epsrel=1e-11)
    return weighted / mass


def mc_expected_payoff(params, strike, m, rng):
    """
    Monte Carlo estimate of E[f(S_T)] from m exact terminal draws.

    Args:
        params (GbmParams): Model parameters
        strike (float): Strike K
        m (int): Sample count, at least 2
        rng: Generator or seed

    Returns:
        tuple: (sample mean, sample std / sqrt(m))
    """
    if not isinstance(m, int) or m < 2:
        raise DomainError("m must be an integer >= 2")
    payoffs = payoff_call(sample_terminal_prices(params, m, rng), strike)
    estimate = float(np.mean(payoffs))
    stderr = float(np.std(payoffs, ddof=1) / math.sqrt(m))
    logger.debug("MC estimate over %d samples: %.6f +- %.6f", m, estimate, stderr)
    return estimate, stderr


# Example usage
if __name__ == "__main__":
    baseline = GbmParams(s0=2.0, drift=0.07, volatility=0.3, maturity=1.0, risk_free_rate=0.07)
    print(f"Model: {baseline}")
    print(f"Moments at T: {gbm_moments(baseline, baseline.maturity)}")
    print(f"Analytic E[f] (K=1.7): {analytic_expected_payoff(baseline, 1.7):.6f}")
    estimate, stderr = mc_expected_payoff(baseline, 1.7, 200_000, rng=7)
    print(f"Monte Carlo E[f]:      {estimate:.6f} +- {stderr:.6f}")
    print(f"Fair value:            {discounted_fair_value(baseline, 1.7):.6f}")
