"""
Qudit Option Pricer
Mixed-dimension statevector simulation and European call pricing
"""

__version__ = "1.0.0"
