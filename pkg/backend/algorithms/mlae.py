"""
Maximum-Likelihood Amplitude Estimation
Grover operator, exponential measurement schedule and likelihood maximization
"""

import logging
import math

import numpy as np
from scipy import optimize

from backend.algorithms.qudit_engine import marginal_probability, sample_measurement
from backend.models.errors import DomainError, LayoutError
from backend.models.estimation import MleResult, Schedule, ShotRecord
from backend.models.register import ROLE_PAYOFF, MatrixOp, StateVector
from backend.utils.random_streams import make_stream, spawn_streams

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 100_000

# Probability clamp keeping the log-likelihood finite at theta in {0, pi/2}
LIKELIHOOD_EPS = 1e-15


def _payoff_name(layout):
    names = layout.names(ROLE_PAYOFF)
    if len(names) != 1:
        raise LayoutError(f"Layout needs exactly one payoff qubit, found {len(names)}")
    return names[0]


def ground_reflection(layout):
    """S_0 = I - 2|0><0| over the full composite space, ancillas included."""
    matrix = np.eye(layout.total_dim, dtype=complex)
    matrix[0, 0] = -1.0
    return MatrixOp(layout, matrix)


def good_state_reflection(layout):
    """S_Psi1 = I - 2 (I (x) |1><1|_payoff): phase -1 on every basis state with payoff digit 1."""
    signs = 1.0 - 2.0 * (layout.digits(_payoff_name(layout)) == 1)
    return MatrixOp(layout, np.diag(signs.astype(complex)))


def build_grover(A, layout):
    """
    Grover operator Q = -(A S_0 A^dagger) S_Psi1.

    A S_0 A^dagger is the reflection I - 2|a><a| about a = A|0>, so only the first
    column of A is needed.

    Args:
        A (MatrixOp): State-preparation oracle
        layout (RegisterLayout): Register with one payoff-role qubit

    Returns:
        MatrixOp: Q

    Raises:
        LayoutError: If A lives on another layout or there is no payoff qubit
    """
    if not isinstance(A, MatrixOp):
        raise TypeError("A must be a MatrixOp")
    if A.layout != layout:
        raise LayoutError("Oracle and layout differ")
    signs = np.diag(good_state_reflection(layout).matrix)

    a = A.matrix[:, 0]
    reflection = np.eye(layout.total_dim, dtype=complex) - 2.0 * np.outer(a, a.conj())
    return MatrixOp(layout, -reflection * signs[None, :])


def grover_power_probability(theta, j):
    """
    Good-state probability sin^2((2j + 1) theta) after j Grover iterations.

    Raises:
        DomainError: If theta is outside [0, pi/2] or j is negative
    """
    if not 0.0 <= theta <= math.pi / 2:
        raise DomainError(f"theta must lie in [0, pi/2], got {theta}")
    if j < 0:
        raise DomainError("j must be non-negative")
    return math.sin((2 * j + 1) * theta) ** 2


class AmplitudeEstimator:
    """
    Runs measurement schedules on Q^m A|0> and estimates the payoff angle.

    Powers Q^(2^b) are built by repeated squaring on first use and cached;
    Q^m A|0> is then assembled from the set bits of m.
    """

    def __init__(self, A, layout, Q=None):
        """
        Initialize an AmplitudeEstimator.

        Args:
            A (MatrixOp): State-preparation oracle
            layout (RegisterLayout): Register with one payoff-role qubit
            Q (MatrixOp): Grover operator (default: built from A)

        Raises:
            LayoutError: If the operators do not match the layout
        """
        if Q is None:
            Q = build_grover(A, layout)
        elif Q.layout != layout or A.layout != layout:
            raise LayoutError("Oracle, Grover operator and layout differ")

        self.layout = layout
        self.payoff = _payoff_name(layout)
        self.A = A
        self.Q = Q
        self._powers = [Q.matrix]
        self._prepared = A.matrix[:, 0].copy()

    def _power(self, bit):
        while len(self._powers) <= bit:
            last = self._powers[-1]
            self._powers.append(last @ last)
        return self._powers[bit]

    def prepared_state(self, m):
        """
        State Q^m A|0>.

        Returns:
            StateVector: The amplified state
        """
        if not isinstance(m, (int, np.integer)) or m < 0:
            raise DomainError("m must be a non-negative integer")
        amps = self._prepared
        bit = 0
        while m:
            if m & 1:
                amps = self._power(bit) @ amps
            m >>= 1
            bit += 1
        return StateVector(self.layout, amps)

    def payoff_probability(self, m=0):
        """Probability of reading the payoff qubit as |1> on Q^m A|0>."""
        return marginal_probability(self.prepared_state(m), self.payoff, 1)

    def run_schedule(self, sched, rng):
        """
        Measure the payoff qubit N times at every schedule level.

        Each level draws from its own child stream, so results depend only on the seed.

        Args:
            sched (Schedule): Levels and shots
            rng: Generator or seed

        Returns:
            list: ShotRecord per level
        """
        if not isinstance(sched, Schedule):
            raise TypeError("Must provide a Schedule")
        streams = spawn_streams(make_stream(rng), len(sched))
        records = []
        for (level, m), stream in zip(sched, streams):
            outcomes = sample_measurement(self.prepared_state(m), self.payoff, stream,
                                          shots=sched.shots_per_level)
            hits = int(np.count_nonzero(outcomes == 1))
            records.append(ShotRecord(level, m, sched.shots_per_level, hits))
            logger.debug("Level %d (m=%d): %d/%d hits", level, m, hits, sched.shots_per_level)
        return records

    def estimate(self, sched, rng, grid_points=DEFAULT_GRID_POINTS):
        """
        Run a schedule and maximize the likelihood.

        Returns:
            tuple: (MleResult, list of ShotRecord)
        """
        records = self.run_schedule(sched, rng)
        return mle_estimate(records, grid_points), records


def run_schedule(A, Q, layout, sched, rng):
    """Schedule run with a one-off estimator; see AmplitudeEstimator.run_schedule."""
    return AmplitudeEstimator(A, layout, Q).run_schedule(sched, rng)


def _record_arrays(records):
    if not records:
        raise DomainError("At least one ShotRecord is required")
    factors = np.array([2 * r.m + 1 for r in records], dtype=float)
    hits = np.array([r.hits for r in records], dtype=float)
    misses = np.array([r.shots - r.hits for r in records], dtype=float)
    return factors, hits, misses


def log_likelihood(theta, records):
    """
    Binomial log-likelihood of the records at angle(s) theta, coefficients dropped.

    sum_l s_l ln sin^2((2 m_l + 1) theta) + (N - s_l) ln cos^2((2 m_l + 1) theta),
    with probabilities clamped to [1e-15, 1 - 1e-15].

    Args:
        theta (float or array-like): Angle(s) in [0, pi/2]
        records (list): ShotRecord objects

    Returns:
        float or np.ndarray: Log-likelihood, same shape as theta
    """
    factors, hits, misses = _record_arrays(records)
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr < 0) or np.any(theta_arr > math.pi / 2 + 1e-12):
        raise DomainError("theta must lie in [0, pi/2]")

    angles = np.multiply.outer(theta_arr, factors)
    good = np.clip(np.sin(angles) ** 2, LIKELIHOOD_EPS, 1.0 - LIKELIHOOD_EPS)
    bad = np.clip(np.cos(angles) ** 2, LIKELIHOOD_EPS, 1.0 - LIKELIHOOD_EPS)
    value = np.log(good) @ hits + np.log(bad) @ misses
    return float(value) if value.ndim == 0 else value


def mle_estimate(records, grid_points=DEFAULT_GRID_POINTS):
    """
    Maximum-likelihood angle by dense grid search plus bounded local refinement.

    The grid maximum (first one, so ties favour the smaller angle) is refined with
    scipy's bounded scalar minimizer on the two neighbouring grid cells; the
    refined point is kept only if it strictly improves the likelihood.

    Args:
        records (list): ShotRecord objects, non-empty
        grid_points (int): Grid size over [0, pi/2]

    Returns:
        MleResult: Estimate with oracle-call total and optimum log-likelihood
    """
    if grid_points < 2:
        raise DomainError("grid_points must be >= 2")
    _record_arrays(records)

    grid = np.linspace(0.0, math.pi / 2, grid_points)
    values = log_likelihood(grid, records)
    best = int(np.argmax(values))
    theta_hat, best_value = float(grid[best]), float(values[best])

    lower = grid[max(best - 1, 0)]
    upper = grid[min(best + 1, grid_points - 1)]
    refined = optimize.minimize_scalar(lambda t: -log_likelihood(t, records),
                                       bounds=(lower, upper), method='bounded',
                                       options={'xatol': 1e-12})
    if refined.success and -refined.fun > best_value:
        theta_hat, best_value = float(refined.x), float(-refined.fun)

    oracle_calls = sum(r.oracle_calls for r in records)
    result = MleResult(min(max(theta_hat, 0.0), math.pi / 2), oracle_calls, best_value)
    logger.debug("MLE over %d records: %s", len(records), result)
    return result


def synthetic_records(theta, sched, rng):
    """
    Records drawn from the ideal Grover-power probabilities sin^2((2m + 1) theta).

    Returns:
        list: ShotRecord per schedule level
    """
    rng = make_stream(rng)
    records = []
    for level, m in sched:
        hits = rng.binomial(sched.shots_per_level, grover_power_probability(theta, m))
        records.append(ShotRecord(level, m, sched.shots_per_level, int(hits)))
    return records


def _rmse(theta_star, sched, seeds, rng, grid_points):
    errors = [mle_estimate(synthetic_records(theta_star, sched, stream), grid_points).theta_hat - theta_star
              for stream in spawn_streams(rng, seeds)]
    return float(np.sqrt(np.mean(np.square(errors))))


def error_scaling_experiment(theta_star, shots, levels_range, seeds, rng, grid_points=DEFAULT_GRID_POINTS):
    """
    RMSE of the angle estimate against oracle calls for growing schedule cutoffs.

    Args:
        theta_star (float): True angle
        shots (int): Shots per level N
        levels_range (iterable): Schedule cutoffs T to try
        seeds (int): Independent repeats per cutoff
        rng: Generator or seed
        grid_points (int): Likelihood grid size

    Returns:
        list: Dicts with keys levels, oracle_calls, rmse
    """
    levels_range = list(levels_range)
    rows = []
    for levels, stream in zip(levels_range, spawn_streams(make_stream(rng), len(levels_range))):
        sched = Schedule(levels, shots)
        rmse = _rmse(theta_star, sched, seeds, stream, grid_points)
        rows.append({'levels': levels, 'oracle_calls': sched.oracle_calls, 'rmse': rmse})
        logger.info("T=%d M=%d rmse=%.3e", levels, sched.oracle_calls, rmse)
    return rows


def classical_scaling_experiment(theta_star, shots_list, seeds, rng, grid_points=DEFAULT_GRID_POINTS):
    """
    Same as error_scaling_experiment but without amplification: T = 0 and growing N.

    Returns:
        list: Dicts with keys shots, oracle_calls, rmse
    """
    shots_list = list(shots_list)
    rows = []
    for shots, stream in zip(shots_list, spawn_streams(make_stream(rng), len(shots_list))):
        sched = Schedule(0, shots)
        rows.append({'shots': shots, 'oracle_calls': sched.oracle_calls,
                     'rmse': _rmse(theta_star, sched, seeds, stream, grid_points)})
    return rows


def loglog_slope(rows):
    """
    Least-squares slope of log(rmse) against log(oracle_calls).

    Raises:
        DomainError: With fewer than two rows or a non-positive rmse
    """
    if len(rows) < 2:
        raise DomainError("Need at least two rows for a slope")
    calls = np.array([row['oracle_calls'] for row in rows], dtype=float)
    rmse = np.array([row['rmse'] for row in rows], dtype=float)
    if np.any(rmse <= 0):
        raise DomainError("rmse must be positive for a log-log fit")
    return float(np.polyfit(np.log(calls), np.log(rmse), 1)[0])


def records_rows(records):
    """CSV rows (ell, m, N, hits)."""
    return [(r.level, r.m, r.shots, r.hits) for r in records]
