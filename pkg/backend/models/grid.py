"""
Asset Grid Model
Truncated, discretized asset-price domain held by a qudit register
"""

import numpy as np

from backend.models.errors import DomainError


class AssetGrid:
    """
    The d^n sample points of the truncated price domain and their probabilities.

    Point i sits at the centre of cell i: s_i = s_min + (i + 1/2) * omega.

    Attributes:
        s_min (float): Lower truncation bound
        s_max (float): Upper truncation bound
        omega (float): Cell width (s_max - s_min) / d^n
        d (int): Qudit dimension
        n (int): Number of asset qudits
        points (np.ndarray): Sample prices s_i
        probs (np.ndarray): Normalized probabilities p_i
        norm (float): Normalizer, the sum of the unnormalized density samples
    """

    def __init__(self, s_min, s_max, d, n, weights):
        """
        Initialize an AssetGrid from unnormalized density samples.

        Args:
            s_min (float): Lower bound, non-negative
            s_max (float): Upper bound, above s_min
            d (int): Qudit dimension, at least 2
            n (int): Qudit count, at least 1
            weights (array-like): d^n non-negative density samples at the cell centres

        Raises:
            DomainError: On bad bounds, dimensions or weights
        """
        if not isinstance(d, int) or d < 2:
            raise DomainError("d must be an integer >= 2")
        if not isinstance(n, int) or n < 1:
            raise DomainError("n must be an integer >= 1")
        if s_min < 0 or not s_max > s_min:
            raise DomainError("Need 0 <= s_min < s_max")

        size = d ** n
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (size,):
            raise DomainError(f"Expected {size} weights, got shape {weights.shape}")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise DomainError("Weights must be finite and non-negative")

        norm = float(weights.sum())
        if norm <= 0:
            raise DomainError("Weights sum to zero; the grid carries no probability mass")

        self.s_min = float(s_min)
        self.s_max = float(s_max)
        self.d = d
        self.n = n
        self.omega = (self.s_max - self.s_min) / size
        self.norm = norm

        points = self.s_min + (np.arange(size) + 0.5) * self.omega
        probs = weights / norm
        points.setflags(write=False)
        probs.setflags(write=False)
        self.points = points
        self.probs = probs

    @property
    def size(self):
        """Number of grid points, d^n"""
        return self.d ** self.n

    @property
    def top_point(self):
        """The largest sample point s_{d^n - 1}"""
        return float(self.points[-1])

    def point(self, index):
        """Price represented by register integer `index` (the affine map)."""
        if not 0 <= index < self.size:
            raise DomainError(f"Index {index} outside [0, {self.size - 1}]")
        return self.s_min + (index + 0.5) * self.omega

    def __len__(self):
        return self.size

    def __str__(self):
        return (f"AssetGrid(d={self.d}, n={self.n}, "
                f"[{self.s_min:.4f}, {self.s_max:.4f}], omega={self.omega:.4f})")

    def __repr__(self):
        return (f"AssetGrid(s_min={self.s_min}, s_max={self.s_max}, d={self.d}, "
                f"n={self.n}, norm={self.norm})")

    def to_dict(self):
        """
        Convert grid to dictionary format.

        Returns:
            dict: Bounds, dimensions and per-point data
        """
        return {
            's_min': self.s_min,
            's_max': self.s_max,
            'omega': self.omega,
            'd': self.d,
            'n': self.n,
            'norm': self.norm,
            'points': [float(s) for s in self.points],
            'probs': [float(p) for p in self.probs]
        }
