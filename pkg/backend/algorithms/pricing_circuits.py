"""
Pricing Circuits
Probability loader, strike comparator and payoff loader, composed into the oracle A = L_f C_k P
"""

import itertools
import logging
import math

import numpy as np

from backend.algorithms.discretization import discretized_expected_payoff, strike_index
from backend.algorithms.qudit_engine import gates_to_matrix
from backend.models.encoding import ComparatorVariant
from backend.models.errors import DegenerateEncodingError, DomainError, LayoutError
from backend.models.register import (
    MAX_TOTAL_DIM, ROLE_ASSET, ROLE_CARRY, ROLE_COMPARATOR, ROLE_PAYOFF,
    ControlledGate, MatrixOp, RegisterLayout,
)

logger = logging.getLogger(__name__)

DEFAULT_SCALE_C = 0.05
PAYOFF_SHIFT = math.pi / 4

_ANGLE_TOL = 1e-12


class PayoffEncoding:
    """
    Shift-and-scale encoding of the call payoff into a payoff-qubit rotation angle.

    Cell i gets angle pi/4 - c when i < k and 2c (s_i - K)/(s_{d^n-1} - K) + pi/4 - c
    when i >= k, i.e. c * f~(i) + pi/4.

    Attributes:
        grid (AssetGrid): The discretized distribution
        strike (float): Strike price K
        c (float): Scaling constant in (0, pi/4]
        s (float): Shift, pi/4
        k (int): Strike index
        denominator (float): s_{d^n-1} - K
    """

    def __init__(self, grid, strike, c=DEFAULT_SCALE_C):
        """
        Initialize a PayoffEncoding.

        Raises:
            DomainError: If c is outside (0, pi/4] or an angle leaves [0, pi/2]
            DegenerateEncodingError: If the strike is at or above the top grid point
        """
        if not 0 < c <= math.pi / 4:
            raise DomainError(f"c must lie in (0, pi/4], got {c}")
        denominator = grid.top_point - strike
        if denominator <= 0:
            raise DegenerateEncodingError(
                f"Strike {strike} is at or above the top grid point {grid.top_point}")

        self.grid = grid
        self.strike = float(strike)
        self.c = float(c)
        self.s = PAYOFF_SHIFT
        self.k = strike_index(grid, strike, clamp=True)
        self.denominator = denominator

        angles = self.angles()
        if np.any(angles < -_ANGLE_TOL) or np.any(angles > math.pi / 2 + _ANGLE_TOL):
            raise DomainError("Encoded angles leave [0, pi/2]; reduce c")

    def scaled_payoff(self):
        """f~(i) in [-1, 1] as seen by the register (comparator branch decides i >= k)."""
        f = np.full(self.grid.size, -1.0)
        above = np.arange(self.grid.size) >= self.k
        f[above] = 2.0 * (self.grid.points[above] - self.strike) / self.denominator - 1.0
        return f

    def angles(self):
        """Rotation angle applied to the payoff qubit for every register value."""
        return self.c * self.scaled_payoff() + self.s

    def __repr__(self):
        return (f"PayoffEncoding(strike={self.strike}, k={self.k}, c={self.c}, "
                f"denominator={self.denominator:.6f})")


def to_digits(value, d, n):
    """Little-endian base-d digits of `value` (digit j has weight d^j)."""
    digits = []
    for _ in range(n):
        digits.append(value % d)
        value //= d
    return digits


def format_digits(digits):
    """Most-significant-first string for little-endian digits, e.g. [1, 4, 1, 2] -> '2141'."""
    return "".join(str(x) for x in reversed(digits))


def complement_digits(k, d, n):
    """
    Method of complements: (d-1)'s complement of each digit of k, plus one.

    Args:
        k (int): Integer in [1, d^n)
        d (int): Base
        n (int): Digit count

    Returns:
        list: Little-endian digits of k^c = d^n - k

    Raises:
        DomainError: If k is outside [0, d^n); k = 0 signals the always-true comparison,
            whose complement overflows n digits
    """
    if not 0 <= k < d ** n:
        raise DomainError(f"k must lie in [0, {d ** n}), got {k}")
    if k == 0:
        raise DomainError("k = 0 has no n-digit complement; i >= 0 holds for every i")

    digits = [d - 1 - x for x in to_digits(k, d, n)]
    carry = 1
    for j in range(n):
        total = digits[j] + carry
        digits[j], carry = total % d, total // d
    return digits


def pricing_layout(grid, variant=ComparatorVariant.LINEAR_ANCILLA, max_dim=MAX_TOTAL_DIM):
    """
    Register for the oracle: asset qudits i0..i{n-1}, carry qubits, comparator c, payoff p.

    Returns:
        RegisterLayout: Layout with the asset qudits as the least-significant subsystems
    """
    variant = ComparatorVariant.parse(variant)
    subsystems = [(f"i{j}", grid.d, ROLE_ASSET) for j in range(grid.n)]
    subsystems += [(f"a{j}", 2, ROLE_CARRY) for j in range(variant.carry_qubits(grid.n))]
    subsystems += [("c", 2, ROLE_COMPARATOR), ("p", 2, ROLE_PAYOFF)]
    return RegisterLayout(subsystems, max_dim)


def _asset_names(grid, layout):
    names = layout.names(ROLE_ASSET)
    if len(names) != grid.n or any(layout.dim_of(name) != grid.d for name in names):
        raise LayoutError(f"Layout needs {grid.n} asset qudits of dimension {grid.d}")
    return names


def _single_role(layout, role):
    names = layout.names(role)
    if len(names) != 1:
        raise LayoutError(f"Layout needs exactly one '{role}' qubit, found {len(names)}")
    return names[0]


def build_probability_loader(grid, layout):
    """
    Householder unitary whose first asset-space column is (sqrt p_0, ..., sqrt p_{d^n-1}).

    With p the vector of square-root probabilities and w = p - e_0,
    P = I - 2 w w^T / (w^T w), which equals I - w w^T / (1 - sqrt p_0).
    The asset qudits must be the leading subsystems; P acts as the identity elsewhere.

    Returns:
        MatrixOp: The loader on the full register
    """
    names = _asset_names(grid, layout)
    if [layout.position(name) for name in names] != list(range(grid.n)):
        raise LayoutError("Asset qudits must be the leading subsystems of the layout")

    size = grid.size
    amplitudes = np.sqrt(grid.probs)
    w = amplitudes.copy()
    w[0] -= 1.0
    w_norm2 = float(w @ w)
    if w_norm2 < 1e-24:
        block = np.eye(size)
    else:
        block = np.eye(size) - 2.0 * np.outer(w, w) / w_norm2

    rest = layout.total_dim // size
    return MatrixOp(layout, np.kron(np.eye(rest), block))


def _carry_out_set(d, digit, carry_in):
    """Digit values v for which v + digit + carry_in produces a carry."""
    return {v for v in range(d) if v + digit + carry_in >= d}


def _linear_comparator(kc, d, assets, carries, comparator):
    n = len(assets)
    forward = [ControlledGate.x(carries[0], [(assets[0], _carry_out_set(d, kc[0], 0))])]
    targets = carries[1:n - 1] + [comparator]
    for j in range(1, n):
        propagate = {v for v in range(d) if v + kc[j] == d - 1}
        generate = _carry_out_set(d, kc[j], 0)
        stage = [
            ControlledGate.x(targets[j - 1], [(assets[j], propagate), (carries[j - 1], {1})]),
            ControlledGate.x(targets[j - 1], [(assets[j], generate)]),
        ]
        if j < n - 1:
            forward += stage
        else:
            final = stage
    return forward + final + [g.inverse() for g in reversed(forward)]


def _single_comparator(kc, d, assets, carry, comparator):
    n = len(assets)
    forward = []
    # One gate per carry pattern (c_1, ..., c_{n-1}); the patterns are mutually exclusive
    for pattern in itertools.product((1, 0), repeat=n - 1):
        carries_in = (0,) + pattern
        controls = []
        for j in range(n):
            fires = _carry_out_set(d, kc[j], carries_in[j])
            wanted = 1 if j == n - 1 else pattern[j]
            controls.append((assets[j], fires if wanted else set(range(d)) - fires))
        forward.append(ControlledGate.x(carry, controls))
    copy = ControlledGate.x(comparator, [(carry, {1})])
    return forward + [copy] + [g.inverse() for g in reversed(forward)]


def build_comparator(k, grid, layout, variant=ComparatorVariant.LINEAR_ANCILLA):
    """
    Gates flipping the comparator qubit exactly when the register integer i >= k.

    Carry ancillas start and end in |0>. For n = 1 a single X controlled on
    {i : i >= k} is used; for k = 0 the comparator is flipped unconditionally.

    Args:
        k (int): Strike index in [0, d^n)
        grid (AssetGrid): The grid (supplies d and n)
        layout (RegisterLayout): Register with asset, carry and comparator subsystems
        variant (ComparatorVariant): Carry budget

    Returns:
        list: ControlledGate objects in application order

    Raises:
        DomainError: If k is out of range
        LayoutError: If the layout lacks the required subsystems
    """
    variant = ComparatorVariant.parse(variant)
    d, n = grid.d, grid.n
    if not isinstance(k, (int, np.integer)) or not 0 <= k < d ** n:
        raise DomainError(f"k must lie in [0, {d ** n}), got {k}")
    assets = _asset_names(grid, layout)
    comparator = _single_role(layout, ROLE_COMPARATOR)

    if k == 0:
        return [ControlledGate.x(comparator)]
    if n == 1:
        return [ControlledGate.x(comparator, [(assets[0], set(range(k, d)))])]

    kc = complement_digits(int(k), d, n)
    carries = layout.names(ROLE_CARRY)
    needed = variant.carry_qubits(n)
    if len(carries) < needed:
        raise LayoutError(f"{variant.value} comparator needs {needed} carry qubits, layout has {len(carries)}")

    if variant is ComparatorVariant.LINEAR_ANCILLA:
        return _linear_comparator(kc, d, assets, carries[:needed], comparator)
    return _single_comparator(kc, d, assets, carries[0], comparator)


def build_payoff_loader(enc, layout):
    """
    Rotations encoding c f~(i) + pi/4 into the payoff qubit.

    One uncontrolled R_Y(pi/4 - c), one comparator-controlled offset
    R_Y(2c (s_min + omega/2 - K) / den), then for each digit j and value v >= 1 a
    rotation R_Y(2c omega d^j v / den) controlled on comparator = 1 and i_j = v.
    The rotations add, so the comparator-1 branch receives 2c (s_i - K)/den + pi/4 - c.

    Returns:
        list: ControlledGate objects in application order
    """
    grid = enc.grid
    assets = _asset_names(grid, layout)
    comparator = _single_role(layout, ROLE_COMPARATOR)
    payoff = _single_role(layout, ROLE_PAYOFF)

    scale = 2.0 * enc.c / enc.denominator
    on = [(comparator, {1})]
    gates = [
        ControlledGate.ry(payoff, enc.s - enc.c),
        ControlledGate.ry(payoff, scale * (grid.point(0) - enc.strike), on),
    ]
    for j, name in enumerate(assets):
        weight = scale * grid.omega * grid.d ** j
        for v in range(1, grid.d):
            gates.append(ControlledGate.ry(payoff, weight * v, on + [(name, {v})]))
    return gates


def build_oracle_A(grid, strike, c=DEFAULT_SCALE_C, variant=ComparatorVariant.LINEAR_ANCILLA):
    """
    Dense oracle A = L_f C_k P on the pricing register.

    Returns:
        tuple: (RegisterLayout, MatrixOp)
    """
    enc = PayoffEncoding(grid, strike, c)
    layout = pricing_layout(grid, variant)
    loader = build_probability_loader(grid, layout)
    gates = build_comparator(enc.k, grid, layout, variant) + build_payoff_loader(enc, layout)
    oracle = gates_to_matrix(layout, gates, start=loader)
    logger.debug("Oracle built: %s, k=%d, %d gates", layout, enc.k, len(gates))
    return layout, oracle


def exact_payoff_probability(grid, strike, c=DEFAULT_SCALE_C):
    """P_1 = sum_i p_i sin^2(angle_i), the exact payoff-qubit |1> probability after A."""
    enc = PayoffEncoding(grid, strike, c)
    return float(np.dot(grid.probs, np.sin(enc.angles()) ** 2))


def register_expected_payoff(grid, strike):
    """sum_{i >= k} p_i (s_i - K): the payoff the comparator branch actually encodes."""
    k = strike_index(grid, strike, clamp=True)
    return float(np.dot(grid.probs[k:], grid.points[k:] - strike))


def linear_payoff_probability(grid, strike, c=DEFAULT_SCALE_C):
    """First-order P_1: 1/2 - c + 2c/(s_{d^n-1} - K) * sum_{i >= k} p_i (s_i - K)."""
    enc = PayoffEncoding(grid, strike, c)
    return 0.5 - enc.c + 2.0 * enc.c / enc.denominator * register_expected_payoff(grid, strike)


def encoding_error_bound(grid, strike, c=DEFAULT_SCALE_C):
    """Bound sum_i p_i |c f~(i)|^3 on |exact P_1 - linear P_1|."""
    enc = PayoffEncoding(grid, strike, c)
    return float(np.dot(grid.probs, np.abs(enc.c * enc.scaled_payoff()) ** 3))


def strike_rounding_bias(grid, strike):
    """Gap between the register-encoded payoff and the grid benchmark caused by rounding K to k."""
    return abs(register_expected_payoff(grid, strike) - discretized_expected_payoff(grid, strike))


def expected_payoff_from_p1(p1, grid, strike, c=DEFAULT_SCALE_C):
    """
    Invert the first-order P_1 relation: E[f] = (p1 - 1/2 + c) (s_{d^n-1} - K) / (2c).

    Small negative results are possible from the cubic encoding error and are returned as-is.

    Raises:
        DomainError: If c <= 0 or p1 is outside [0, 1]
        DegenerateEncodingError: If the strike is at or above the top grid point
    """
    if c <= 0:
        raise DomainError("c must be positive")
    if not 0.0 <= p1 <= 1.0:
        raise DomainError(f"p1 must lie in [0, 1], got {p1}")
    denominator = grid.top_point - strike
    if denominator <= 0:
        raise DegenerateEncodingError(
            f"Strike {strike} is at or above the top grid point {grid.top_point}")
    value = (p1 - 0.5 + c) * denominator / (2.0 * c)
    if value < 0:
        logger.warning("Inverted expected payoff is negative (%.3e); encoding error dominates", value)
    return value


def format_circuit(gates):
    """
    Text listing of a gate sequence, one line per gate.

    Returns:
        str: Numbered gate lines
    """
    lines = []
    for number, gate in enumerate(gates):
        suffix = "  (identity: empty control set)" if gate.is_identity else ""
        lines.append(f"{number:4d}: {gate}{suffix}")
    return "\n".join(lines)
