"""
Error Types
Exceptions raised across the pricing pipeline
"""


class PricingError(ValueError):
    """Base class for every pipeline error. Subclasses ValueError so callers
    catching ValueError (API layer, CLI) keep working."""


class DomainError(PricingError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateEncodingError(DomainError):
    """The strike sits at or above the top grid point, so the payoff
    scaling denominator s_{d^n-1} - K is not positive."""


class LayoutError(PricingError):
    """A gate or operator does not fit the register layout it is applied to."""


class ResourceLimitError(PricingError):
    """The requested register exceeds the dense-simulation cap."""


class UnitarityError(PricingError):
    """A matrix failed unitarity validation."""


class ConfigError(PricingError):
    """A run configuration or config file is invalid."""
