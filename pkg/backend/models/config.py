"""
Run Configuration
Validated parameter set for every pipeline command
"""

import math
from typing import List, Optional

from pydantic import BaseModel, Field, root_validator, validator

from backend.models.encoding import ComparatorVariant
from backend.models.market import GbmParams
from backend.models.register import MAX_TOTAL_DIM

SCHEMA_VERSION = "qudit-pricer/report/v1"


class RunConfig(BaseModel):
    """
    All inputs of a pricing run. Defaults reproduce the baseline setting:
    S0 = 2.0, alpha = r = 0.07, sigma = 0.3, T = 1, K = 1.7, one 8-level qudit,
    c = 0.05, N = 100 shots and 7 Grover levels.
    """

    s0: float = Field(2.0, gt=0, description="Spot price S0")
    drift: float = Field(0.07, description="Drift alpha")
    rate: float = Field(0.07, description="Risk-free rate r")
    sigma: float = Field(0.3, gt=0, description="Volatility")
    maturity: float = Field(1.0, gt=0, description="Maturity T in years")
    strike: float = Field(1.7, gt=0, description="Strike price K")
    dim: int = Field(8, ge=2, description="Qudit dimension d")
    qudits: int = Field(1, ge=1, description="Asset qudit count n")
    scale_c: float = Field(0.05, gt=0, le=math.pi / 4, description="Payoff scaling constant c")
    trunc_sigmas: float = Field(3.0, gt=0, description="Truncation width in standard deviations")
    shots: int = Field(100, ge=1, description="Shots per schedule level N")
    levels: int = Field(7, ge=0, le=16, description="Schedule cutoff T")
    seed: Optional[int] = Field(None, ge=0, description="Root RNG seed")
    variant: str = Field('linear', description="Comparator variant: linear or single")
    out: Optional[str] = Field(None, description="Output path")
    format: str = Field('json', description="Output format: csv or json")
    mc_samples: int = Field(100_000, ge=2, description="Classical Monte Carlo sample count")
    repeats: int = Field(1, ge=1, description="Seed repeats per sweep row")
    dims: Optional[List[int]] = Field(None, description="Dimensions for sweep-dim")
    n_paths: int = Field(10, ge=1, description="Number of sample paths")
    steps: int = Field(252, ge=1, description="Time steps per path")
    grid_points: int = Field(100_000, ge=10, description="Likelihood search grid size")
    curve_samples: int = Field(400, ge=2, description="Density curve sample count")
    workers: int = Field(1, ge=1, description="Parallel sweep workers")

    class Config:
        extra = 'forbid'

    @validator('variant')
    def _check_variant(cls, value):
        return ComparatorVariant.parse(value).value

    @validator('format')
    def _check_format(cls, value):
        value = value.lower()
        if value not in ('csv', 'json'):
            raise ValueError("format must be 'csv' or 'json'")
        return value

    @validator('dims')
    def _check_dims(cls, value):
        if value is None:
            return value
        if not value:
            raise ValueError("dims must not be empty")
        if any(d < 2 for d in value):
            raise ValueError("every sweep dimension must be >= 2")
        return value

    @root_validator(skip_on_failure=True)
    def _check_register_size(cls, values):
        variant = ComparatorVariant.parse(values['variant'])
        n = values['qudits']
        for d in [values['dim']] + list(values.get('dims') or []):
            total = d ** n * 2 ** (variant.carry_qubits(n) + 2)
            if total > MAX_TOTAL_DIM:
                raise ValueError(
                    f"register with d={d}, n={n} needs total dimension {total}, "
                    f"above the cap of {MAX_TOTAL_DIM}")
        return values

    def gbm_params(self):
        """Market parameters as a GbmParams object."""
        return GbmParams(self.s0, self.drift, self.sigma, self.maturity, self.rate)

    def comparator_variant(self):
        return ComparatorVariant.parse(self.variant)

    def sweep_dims(self):
        """Dimensions for the sweep: explicit list, else 2..dim."""
        return list(self.dims) if self.dims else list(range(2, self.dim + 1))
