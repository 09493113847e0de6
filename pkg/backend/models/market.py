"""
Market Model
Parameters of the geometric Brownian motion asset model and sampled price paths
"""

import math

import numpy as np

from backend.models.errors import DomainError


class GbmParams:
    """
    Parameters of the Black-Scholes-Merton asset model.

    Attributes:
        s0 (float): Spot price at t = 0
        drift (float): Drift rate alpha per unit time
        volatility (float): Volatility sigma per square-root unit time
        maturity (float): Contract maturity T in years
        risk_free_rate (float): Continuously compounded risk-free rate r
    """

    def __init__(self, s0, drift, volatility, maturity, risk_free_rate=0.0):
        """
        Initialize a GbmParams object.

        Args:
            s0 (float): Spot price, must be positive
            drift (float): Drift rate alpha
            volatility (float): Volatility sigma, must be positive
            maturity (float): Maturity T, must be positive
            risk_free_rate (float): Risk-free rate r (default: 0.0)

        Raises:
            DomainError: If s0, volatility or maturity are not positive
        """
        for name, value in (("s0", s0), ("drift", drift), ("volatility", volatility),
                            ("maturity", maturity), ("risk_free_rate", risk_free_rate)):
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number")

        if s0 <= 0:
            raise DomainError("s0 must be positive")
        if volatility <= 0:
            raise DomainError("volatility must be positive")
        if maturity <= 0:
            raise DomainError("maturity must be positive")

        self.s0 = float(s0)
        self.drift = float(drift)
        self.volatility = float(volatility)
        self.maturity = float(maturity)
        self.risk_free_rate = float(risk_free_rate)

    def is_risk_neutral(self):
        """True when the drift equals the risk-free rate."""
        return self.drift == self.risk_free_rate

    def risk_neutral(self):
        """
        Copy of these parameters priced under the risk-neutral measure.

        Returns:
            GbmParams: Same parameters with drift set to the risk-free rate
        """
        return GbmParams(self.s0, self.risk_free_rate, self.volatility,
                         self.maturity, self.risk_free_rate)

    def __str__(self):
        return (f"GBM(S0={self.s0}, alpha={self.drift}, sigma={self.volatility}, "
                f"T={self.maturity}, r={self.risk_free_rate})")

    def __repr__(self):
        return (f"GbmParams(s0={self.s0}, drift={self.drift}, volatility={self.volatility}, "
                f"maturity={self.maturity}, risk_free_rate={self.risk_free_rate})")

    def __eq__(self, other):
        if not isinstance(other, GbmParams):
            return False
        return self.to_dict() == other.to_dict()

    def to_dict(self):
        """
        Convert parameters to dictionary format.

        Returns:
            dict: Dictionary representation of the parameters
        """
        return {
            's0': self.s0,
            'drift': self.drift,
            'volatility': self.volatility,
            'maturity': self.maturity,
            'risk_free_rate': self.risk_free_rate
        }

    @classmethod
    def from_dict(cls, data):
        """
        Create GbmParams from a dictionary.

        Args:
            data (dict): Dictionary with parameter values

        Returns:
            GbmParams: New parameter object

        Raises:
            KeyError: If required keys are missing
        """
        return cls(
            s0=data['s0'],
            drift=data['drift'],
            volatility=data['volatility'],
            maturity=data['maturity'],
            risk_free_rate=data.get('risk_free_rate', 0.0)
        )


class PricePath:
    """
    A single sampled asset price path.

    Attributes:
        times (np.ndarray): Strictly increasing time points starting at 0
        prices (np.ndarray): Asset prices at those times, all positive
    """

    def __init__(self, times, prices):
        """
        Initialize a PricePath.

        Args:
            times (array-like): Time points
            prices (array-like): Prices, same length as times

        Raises:
            DomainError: If lengths differ, times are not increasing or prices are not positive
        """
        times = np.asarray(times, dtype=float)
        prices = np.asarray(prices, dtype=float)

        if times.ndim != 1 or times.shape != prices.shape:
            raise DomainError("times and prices must be 1-D arrays of the same length")
        if len(times) < 2:
            raise DomainError("A path needs at least two time points")
        if np.any(np.diff(times) <= 0):
            raise DomainError("times must be strictly increasing")
        if np.any(prices <= 0):
            raise DomainError("prices must be positive")

        times.setflags(write=False)
        prices.setflags(write=False)
        self.times = times
        self.prices = prices

    @property
    def s0(self):
        """Starting price"""
        return float(self.prices[0])

    @property
    def final_price(self):
        """Price at the last time point"""
        return float(self.prices[-1])

    def __len__(self):
        return len(self.times)

    def __repr__(self):
        return (f"PricePath(points={len(self)}, t_end={self.times[-1]:.4f}, "
                f"S_start={self.s0:.4f}, S_end={self.final_price:.4f})")

    def to_rows(self, path_id=0):
        """
        Long-format rows for CSV export.

        Args:
            path_id (int): Identifier written in the first column

        Returns:
            list: Rows of (path_id, t, S_t)
        """
        return [(path_id, float(t), float(s)) for t, s in zip(self.times, self.prices)]
