"""
Comparator Variant
The two carry-ancilla budgets for the strike comparator
"""

from enum import Enum


class ComparatorVariant(str, Enum):
    """
    Comparator construction.

    LINEAR_ANCILLA uses n - 1 carry qubits and two-control gates.
    SINGLE_ANCILLA uses one carry qubit and multi-controlled gates, one per carry pattern.
    """

    LINEAR_ANCILLA = 'linear'
    SINGLE_ANCILLA = 'single'

    def carry_qubits(self, n):
        """Number of carry ancillas needed for an n-qudit asset register."""
        if n <= 1:
            return 0
        return n - 1 if self is ComparatorVariant.LINEAR_ANCILLA else 1

    @classmethod
    def parse(cls, value):
        """Accept an enum member or its string value."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"variant must be one of {[v.value for v in cls]}, got '{value}'") from None
