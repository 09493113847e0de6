"""
Domain models: market parameters, grids, registers, estimation records, configuration.
"""

from backend.models.errors import (
    PricingError, DomainError, DegenerateEncodingError, LayoutError,
    ResourceLimitError, UnitarityError, ConfigError,
)
from backend.models.market import GbmParams, PricePath
from backend.models.grid import AssetGrid
from backend.models.register import (
    Subsystem, RegisterLayout, StateVector, ControlledGate, MatrixOp, MAX_TOTAL_DIM,
)
from backend.models.encoding import ComparatorVariant
from backend.models.estimation import Schedule, ShotRecord, MleResult
