"""
Qudit State Engine
Dense statevector simulation over mixed-dimension registers
"""

import logging

import numpy as np

from backend.models.errors import DomainError, LayoutError
from backend.models.register import ControlledGate, MatrixOp, RegisterLayout, StateVector
from backend.utils.random_streams import make_stream

logger = logging.getLogger(__name__)


def _check_layout(state_layout, other_layout):
    if state_layout != other_layout:
        raise LayoutError(f"Layout mismatch: {state_layout} vs {other_layout}")


def init_ground(layout):
    """All subsystems in |0>: amplitude 1 at composite index 0."""
    if not isinstance(layout, RegisterLayout):
        raise TypeError("Must provide a RegisterLayout")
    amps = np.zeros(layout.total_dim, dtype=complex)
    amps[0] = 1.0
    return StateVector(layout, amps)


def basis_state(layout, digits):
    """Computational basis state with the given subsystem digits (others 0)."""
    amps = np.zeros(layout.total_dim, dtype=complex)
    amps[layout.encode(digits)] = 1.0
    return StateVector(layout, amps)


def control_mask(layout, gate):
    """Boolean mask of composite indices whose control digits all lie in their accepted sets."""
    mask = np.ones(layout.total_dim, dtype=bool)
    for name, values in gate.controls:
        mask &= np.isin(layout.digits(name), sorted(values))
    return mask


def transform_columns(layout, gate, block):
    """
    Apply a controlled gate to every column of a (total_dim,) or (total_dim, k) array.

    For each composite index passing the controls, the target-subsystem block
    is multiplied by the gate action; everything else is copied unchanged.

    Args:
        layout (RegisterLayout): The register
        gate (ControlledGate): Gate to apply
        block (np.ndarray): Amplitudes, one state per column

    Returns:
        np.ndarray: New array of the same shape
    """
    if not isinstance(gate, ControlledGate):
        raise TypeError("Must provide a ControlledGate")
    gate.validate(layout)
    block = np.asarray(block)
    if block.shape[0] != layout.total_dim:
        raise LayoutError(f"Leading axis {block.shape[0]} does not match total_dim {layout.total_dim}")

    out = np.array(block, dtype=complex, copy=True)
    if gate.is_identity:
        return out

    target = gate.target
    dim = layout.dim_of(target)
    stride = layout.stride(target)
    base = np.nonzero(control_mask(layout, gate) & (layout.digits(target) == 0))[0]
    if base.size == 0:
        return out

    idx = base[:, None] + stride * np.arange(dim)[None, :]
    out[idx] = np.einsum('vu,bu...->bv...', gate.matrix, block[idx])
    return out


def apply_gate(state, gate):
    """
    Apply one controlled gate.

    Returns:
        StateVector: New state
    """
    return StateVector(state.layout, transform_columns(state.layout, gate, state.amps))


def apply_gates(state, gates):
    """Apply gates in order."""
    amps = state.amps
    for gate in gates:
        amps = transform_columns(state.layout, gate, amps)
    return StateVector(state.layout, amps)


def apply_matrix(state, op):
    """
    Multiply the state by a dense operator.

    Raises:
        LayoutError: If the operator lives on a different layout
    """
    if not isinstance(op, MatrixOp):
        raise TypeError("Must provide a MatrixOp")
    _check_layout(state.layout, op.layout)
    return StateVector(state.layout, op.matrix @ state.amps)


def marginal_distribution(state, subsystem):
    """
    Born-rule distribution of one subsystem's digit.

    Returns:
        np.ndarray: Probability of each digit value
    """
    layout = state.layout
    dim = layout.dim_of(subsystem)
    return np.bincount(layout.digits(subsystem), weights=state.probabilities(), minlength=dim)


def marginal_probability(state, subsystem, value):
    """
    Probability that a subsystem reads `value`.

    Raises:
        DomainError: If value is outside the subsystem's range
    """
    dim = state.layout.dim_of(subsystem)
    if not isinstance(value, (int, np.integer)) or not 0 <= value < dim:
        raise DomainError(f"Value {value} out of range for '{subsystem}' (dim {dim})")
    return float(marginal_distribution(state, subsystem)[value])


def sample_measurement(state, subsystem, rng, shots=None):
    """
    Sample measurement outcomes of one subsystem without collapsing the state.

    Args:
        state (StateVector): State to sample
        subsystem (str): Subsystem name
        rng: Generator or seed
        shots (int): Number of outcomes; None returns a single int

    Returns:
        int or np.ndarray: Outcome(s)
    """
    rng = make_stream(rng)
    probs = np.clip(marginal_distribution(state, subsystem), 0.0, None)
    probs = probs / probs.sum()
    outcomes = rng.choice(len(probs), size=shots, p=probs)
    return int(outcomes) if shots is None else outcomes


def gate_to_matrix(layout, gate):
    """Dense operator equal in action to `gate`."""
    return MatrixOp(layout, transform_columns(layout, gate, np.eye(layout.total_dim, dtype=complex)))


def gates_to_matrix(layout, gates, start=None):
    """
    Dense operator of a gate sequence, optionally preceded by `start`.

    Returns:
        MatrixOp: gates[-1] ... gates[0] start
    """
    if start is not None:
        _check_layout(layout, start.layout)
        block = np.array(start.matrix)
    else:
        block = np.eye(layout.total_dim, dtype=complex)
    for gate in gates:
        block = transform_columns(layout, gate, block)
    logger.debug("Composed %d gates into a %d-dimensional operator", len(gates), layout.total_dim)
    return MatrixOp(layout, block)


def amplitude_rows(state, threshold=None):
    """
    Rows for the amplitude CSV dump.

    Args:
        state (StateVector): State to dump
        threshold (float): Skip amplitudes with modulus at or below this (default: keep all)

    Returns:
        list: (index, re, im) rows
    """
    return [(i, float(a.real), float(a.imag))
            for i, a in enumerate(state.amps) if threshold is None or abs(a) > threshold]
