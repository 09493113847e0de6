"""
Register Model
Subsystem layouts, statevectors, controlled gates and dense operators
"""

import math
from functools import cached_property

import numpy as np

from backend.models.errors import LayoutError, ResourceLimitError, UnitarityError, DomainError

# Dense matrices are total_dim x total_dim complex, so the cap bounds memory.
MAX_TOTAL_DIM = 4096

UNITARY_TOL = 1e-10
GATE_UNITARY_TOL = 1e-12
NORM_TOL = 1e-10

ROLE_ASSET = 'asset'
ROLE_CARRY = 'carry'
ROLE_COMPARATOR = 'comparator'
ROLE_PAYOFF = 'payoff'
ROLES = (ROLE_ASSET, ROLE_CARRY, ROLE_COMPARATOR, ROLE_PAYOFF)


class Subsystem:
    """
    One tensor factor of the register.

    Attributes:
        name (str): Unique label
        dim (int): Local dimension, at least 2
        role (str): One of asset, carry, comparator, payoff
    """

    def __init__(self, name, dim, role):
        if not name or not isinstance(name, str):
            raise LayoutError("Subsystem name must be a non-empty string")
        if not isinstance(dim, int) or dim < 2:
            raise LayoutError(f"Subsystem '{name}' needs an integer dimension >= 2")
        if role not in ROLES:
            raise LayoutError(f"Unknown role '{role}' for subsystem '{name}'")

        self.name = name
        self.dim = dim
        self.role = role

    def __repr__(self):
        return f"Subsystem(name='{self.name}', dim={self.dim}, role='{self.role}')"

    def __eq__(self, other):
        if not isinstance(other, Subsystem):
            return False
        return (self.name, self.dim, self.role) == (other.name, other.dim, other.role)

    def __hash__(self):
        return hash((self.name, self.dim, self.role))


class RegisterLayout:
    """
    Ordered list of subsystems spanning a tensor-product space.

    Subsystem 0 is the least-significant digit of the composite basis index:
    index = x_0 + dim_0 * x_1 + dim_0 * dim_1 * x_2 + ...

    Attributes:
        subsystems (tuple): Subsystem objects in order
        total_dim (int): Product of all dimensions
    """

    def __init__(self, subsystems, max_dim=MAX_TOTAL_DIM):
        """
        Initialize a RegisterLayout.

        Args:
            subsystems (list): Subsystem objects or (name, dim, role) tuples
            max_dim (int): Cap on total_dim (default: MAX_TOTAL_DIM)

        Raises:
            LayoutError: If the list is empty or names repeat
            ResourceLimitError: If total_dim exceeds the cap
        """
        parsed = []
        for item in subsystems:
            parsed.append(item if isinstance(item, Subsystem) else Subsystem(*item))
        if not parsed:
            raise LayoutError("A layout needs at least one subsystem")

        names = [s.name for s in parsed]
        if len(names) != len(set(names)):
            raise LayoutError(f"Subsystem names must be unique: {names}")

        total = math.prod(s.dim for s in parsed)
        if total > max_dim:
            raise ResourceLimitError(
                f"Total dimension {total} exceeds the dense-simulation cap of {max_dim}")

        self.subsystems = tuple(parsed)
        self.total_dim = total
        self._positions = {s.name: i for i, s in enumerate(parsed)}
        strides = []
        acc = 1
        for s in parsed:
            strides.append(acc)
            acc *= s.dim
        self._strides = tuple(strides)

    def position(self, name):
        """Index of a subsystem in the ordering."""
        try:
            return self._positions[name]
        except KeyError:
            raise LayoutError(f"No subsystem named '{name}' in layout") from None

    def subsystem(self, name):
        """
        Look up a subsystem by name.

        Args:
            name (str): Subsystem name

        Returns:
            Subsystem: The matching subsystem

        Raises:
            LayoutError: If no subsystem has that name
        """
        return self.subsystems[self.position(name)]

    def dim_of(self, name):
        """
        Dimension of a named subsystem.

        Args:
            name (str): Subsystem name

        Returns:
            int: Local dimension
        """
        return self.subsystem(name).dim

    def stride(self, name):
        """Step in the composite index for a unit change of this subsystem's digit."""
        return self._strides[self.position(name)]

    def names(self, role=None):
        """Subsystem names, optionally only those with a given role."""
        return [s.name for s in self.subsystems if role is None or s.role == role]

    def has_role(self, role):
        """
        Whether any subsystem carries a role.

        Args:
            role (str): Role such as 'asset' or 'carry'

        Returns:
            bool: True if at least one subsystem has it
        """
        return any(s.role == role for s in self.subsystems)

    @cached_property
    def _digit_table(self):
        index = np.arange(self.total_dim)
        table = np.empty((len(self.subsystems), self.total_dim), dtype=np.int64)
        for pos, s in enumerate(self.subsystems):
            table[pos] = (index // self._strides[pos]) % s.dim
        table.setflags(write=False)
        return table

    def digits(self, name):
        """
        Digit of one subsystem for every composite basis index.

        Returns:
            np.ndarray: Integer array of length total_dim
        """
        return self._digit_table[self.position(name)]

    def encode(self, digits):
        """
        Composite index of a basis state.

        Args:
            digits (dict): Subsystem name -> digit; missing subsystems are 0

        Returns:
            int: Composite basis index
        """
        index = 0
        for name, value in digits.items():
            dim = self.dim_of(name)
            if not 0 <= value < dim:
                raise DomainError(f"Digit {value} out of range for '{name}' (dim {dim})")
            index += int(value) * self.stride(name)
        return index

    def decode(self, index):
        """
        Digits of a composite basis index.

        Returns:
            dict: Subsystem name -> digit
        """
        if not 0 <= index < self.total_dim:
            raise DomainError(f"Basis index {index} outside [0, {self.total_dim - 1}]")
        return {s.name: (index // self._strides[pos]) % s.dim
                for pos, s in enumerate(self.subsystems)}

    def __eq__(self, other):
        if not isinstance(other, RegisterLayout):
            return False
        return self.subsystems == other.subsystems

    def __hash__(self):
        return hash(self.subsystems)

    def __str__(self):
        parts = ", ".join(f"{s.name}:{s.dim}" for s in self.subsystems)
        return f"RegisterLayout([{parts}], total_dim={self.total_dim})"

    __repr__ = __str__

    def to_dict(self):
        return {
            'subsystems': [{'name': s.name, 'dim': s.dim, 'role': s.role}
                           for s in self.subsystems],
            'total_dim': self.total_dim
        }


class StateVector:
    """
    Normalized complex amplitudes over a register layout. Immutable.

    Attributes:
        layout (RegisterLayout): The register
        amps (np.ndarray): Complex amplitudes of length layout.total_dim
    """

    def __init__(self, layout, amps, tol=NORM_TOL):
        if not isinstance(layout, RegisterLayout):
            raise TypeError("layout must be a RegisterLayout")
        amps = np.array(amps, dtype=complex)
        if amps.shape != (layout.total_dim,):
            raise LayoutError(
                f"Amplitude vector of shape {amps.shape} does not match total_dim {layout.total_dim}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > tol:
            raise DomainError(f"State is not normalized (norm^2 = {norm})")

        amps.setflags(write=False)
        self.layout = layout
        self.amps = amps

    def norm_squared(self):
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self):
        """Born-rule probability of every composite basis state."""
        return np.abs(self.amps) ** 2

    def __repr__(self):
        return f"StateVector(total_dim={self.layout.total_dim}, norm^2={self.norm_squared():.12f})"


def _is_unitary(matrix, tol):
    identity = np.eye(matrix.shape[0])
    return np.max(np.abs(matrix @ matrix.conj().T - identity)) <= tol


def ry_matrix(theta):
    """
    Y rotation taking |0> to cos(theta)|0> + sin(theta)|1>.

    R_Y(a) R_Y(b) = R_Y(a + b).
    """
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)


class ControlledGate:
    """
    A single-subsystem operation applied when every control digit lies in its
    accepted-value set.

    An empty accepted-value set on any control makes the gate the identity.

    Attributes:
        target (str): Target subsystem name
        kind (str): 'x', 'ry' or 'unitary'
        matrix (np.ndarray): Local action on the target
        theta (float): Rotation angle for 'ry' gates, else None
        controls (tuple): (name, frozenset of accepted digits) pairs
    """

    def __init__(self, target, matrix, controls=None, kind='unitary', theta=None):
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise LayoutError("Gate action must be a square matrix")
        if not _is_unitary(matrix, GATE_UNITARY_TOL):
            raise UnitarityError(f"Action of gate on '{target}' is not unitary")

        parsed = []
        seen = set()
        for name, values in (controls or []):
            if name == target:
                raise LayoutError(f"Subsystem '{name}' cannot control itself")
            if name in seen:
                raise LayoutError(f"Control '{name}' listed twice")
            seen.add(name)
            parsed.append((name, frozenset(int(v) for v in values)))

        matrix.setflags(write=False)
        self.target = target
        self.matrix = matrix
        self.controls = tuple(parsed)
        self.kind = kind
        self.theta = theta

    @classmethod
    def x(cls, target, controls=None):
        """Bit flip on a qubit target."""
        return cls(target, X_MATRIX, controls, kind='x')

    @classmethod
    def ry(cls, target, theta, controls=None):
        """Y rotation by `theta` on a qubit target."""
        return cls(target, ry_matrix(theta), controls, kind='ry', theta=float(theta))

    @classmethod
    def unitary(cls, target, matrix, controls=None):
        """Arbitrary unitary on the target subsystem."""
        return cls(target, matrix, controls, kind='unitary')

    @property
    def is_identity(self):
        """True when some control set is empty, so the gate never fires."""
        return any(len(values) == 0 for _, values in self.controls)

    def validate(self, layout):
        """
        Check this gate against a layout.

        Raises:
            LayoutError: On unknown subsystems, dimension mismatch or bad control values
        """
        target_dim = layout.dim_of(self.target)
        if self.matrix.shape[0] != target_dim:
            raise LayoutError(
                f"Gate action is {self.matrix.shape[0]}-dimensional but '{self.target}' "
                f"has dimension {target_dim}")
        for name, values in self.controls:
            dim = layout.dim_of(name)
            bad = [v for v in values if not 0 <= v < dim]
            if bad:
                raise LayoutError(f"Control values {sorted(bad)} out of range for '{name}' (dim {dim})")

    def inverse(self):
        """Gate with the conjugate-transpose action and the same controls."""
        theta = None if self.theta is None else -self.theta
        return ControlledGate(self.target, self.matrix.conj().T,
                              [(n, v) for n, v in self.controls], kind=self.kind, theta=theta)

    def __str__(self):
        if self.kind == 'ry':
            action = f"RY({self.theta:.6f})"
        elif self.kind == 'x':
            action = "X"
        else:
            action = f"U[{self.matrix.shape[0]}x{self.matrix.shape[0]}]"
        if not self.controls:
            return f"{action} -> {self.target}"
        ctrl = " & ".join(f"{name} in {{{','.join(str(v) for v in sorted(values))}}}"
                          for name, values in self.controls)
        return f"{action} -> {self.target} | {ctrl}"

    def __repr__(self):
        return f"ControlledGate({self})"


class MatrixOp:
    """
    Dense unitary operator on the full register space. Immutable.

    Attributes:
        layout (RegisterLayout): The register
        matrix (np.ndarray): total_dim x total_dim complex unitary
    """

    def __init__(self, layout, matrix, tol=UNITARY_TOL):
        """
        Initialize a MatrixOp.

        Args:
            layout (RegisterLayout): The register
            matrix (array-like): Square complex matrix
            tol (float): Unitarity tolerance (default: 1e-10)

        Raises:
            LayoutError: If the shape does not match the layout
            UnitarityError: If the matrix is not unitary within tol
        """
        if not isinstance(layout, RegisterLayout):
            raise TypeError("layout must be a RegisterLayout")
        matrix = np.array(matrix, dtype=complex)
        expected = (layout.total_dim, layout.total_dim)
        if matrix.shape != expected:
            raise LayoutError(f"Matrix shape {matrix.shape} does not match layout {expected}")
        if not _is_unitary(matrix, tol):
            raise UnitarityError("Operator is not unitary within tolerance")

        matrix.setflags(write=False)
        self.layout = layout
        self.matrix = matrix

    @classmethod
    def identity(cls, layout):
        """
        Identity operator on a register.

        Args:
            layout (RegisterLayout): The register

        Returns:
            MatrixOp: The identity
        """
        return cls(layout, np.eye(layout.total_dim, dtype=complex))

    def dagger(self):
        """
        Conjugate transpose.

        Returns:
            MatrixOp: The inverse operator on the same layout
        """
        return MatrixOp(self.layout, self.matrix.conj().T)

    def compose(self, other):
        """Operator for applying `other` first, then self."""
        if other.layout != self.layout:
            raise LayoutError("Cannot compose operators on different layouts")
        return MatrixOp(self.layout, self.matrix @ other.matrix)

    def __matmul__(self, other):
        return self.compose(other)

    def __repr__(self):
        return f"MatrixOp(total_dim={self.layout.total_dim})"
