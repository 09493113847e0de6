"""
Estimation Models
Measurement schedule, per-level shot tallies and the maximum-likelihood result
"""

import math

from backend.models.errors import DomainError


class Schedule:
    """
    Exponential Grover-power schedule: m_0 = 0 and m_l = 2^(l-1) for l = 1..levels.

    Attributes:
        levels (int): Cutoff T, at least 0
        shots_per_level (int): Shots N taken at every level
        m_values (tuple): Grover powers per level
    """

    def __init__(self, levels, shots_per_level):
        if not isinstance(levels, int) or levels < 0:
            raise DomainError("levels must be an integer >= 0")
        if not isinstance(shots_per_level, int) or shots_per_level < 1:
            raise DomainError("shots_per_level must be an integer >= 1")

        self.levels = levels
        self.shots_per_level = shots_per_level
        self.m_values = (0,) + tuple(2 ** (ell - 1) for ell in range(1, levels + 1))

    @property
    def oracle_calls(self):
        """Total oracle queries: one A per preparation plus two per Grover power."""
        return sum(self.shots_per_level * (2 * m + 1) for m in self.m_values)

    def __iter__(self):
        return iter(enumerate(self.m_values))

    def __len__(self):
        return len(self.m_values)

    def __repr__(self):
        return (f"Schedule(levels={self.levels}, shots_per_level={self.shots_per_level}, "
                f"oracle_calls={self.oracle_calls})")


class ShotRecord:
    """
    Tally of payoff-qubit |1> outcomes at one schedule level.

    Attributes:
        level (int): Level index l
        m (int): Grover power applied
        shots (int): Number of shots N
        hits (int): Number of |1> outcomes s_l
    """

    def __init__(self, level, m, shots, hits):
        if level < 0 or m < 0:
            raise DomainError("level and m must be non-negative")
        if shots < 1:
            raise DomainError("shots must be positive")
        if not 0 <= hits <= shots:
            raise DomainError(f"hits must lie in [0, {shots}], got {hits}")

        self.level = int(level)
        self.m = int(m)
        self.shots = int(shots)
        self.hits = int(hits)

    @property
    def oracle_calls(self):
        return self.shots * (2 * self.m + 1)

    @property
    def frequency(self):
        return self.hits / self.shots

    def __eq__(self, other):
        if not isinstance(other, ShotRecord):
            return False
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"ShotRecord(level={self.level}, m={self.m}, shots={self.shots}, hits={self.hits})"

    def to_dict(self):
        return {'ell': self.level, 'm': self.m, 'N': self.shots, 'hits': self.hits}

    @classmethod
    def from_dict(cls, data):
        return cls(level=data['ell'], m=data['m'], shots=data['N'], hits=data['hits'])


class MleResult:
    """
    Maximum-likelihood estimate of the payoff angle.

    Attributes:
        theta_hat (float): Estimated angle in [0, pi/2]
        p1_hat (float): sin^2(theta_hat)
        oracle_calls (int): Total oracle queries M spent
        log_likelihood (float): Log-likelihood at the optimum
    """

    def __init__(self, theta_hat, oracle_calls, log_likelihood):
        if not 0.0 <= theta_hat <= math.pi / 2:
            raise DomainError(f"theta_hat {theta_hat} outside [0, pi/2]")

        self.theta_hat = float(theta_hat)
        self.p1_hat = math.sin(self.theta_hat) ** 2
        self.oracle_calls = int(oracle_calls)
        self.log_likelihood = float(log_likelihood)

    def __repr__(self):
        return (f"MleResult(theta_hat={self.theta_hat:.8f}, p1_hat={self.p1_hat:.8f}, "
                f"oracle_calls={self.oracle_calls})")

    def to_dict(self):
        return {
            'theta_hat': self.theta_hat,
            'p1_hat': self.p1_hat,
            'oracle_calls': self.oracle_calls,
            'log_likelihood': self.log_likelihood
        }
