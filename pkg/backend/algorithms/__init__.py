"""
Pricing pipeline algorithms: market models, discretization, the qudit engine,
pricing circuits and maximum-likelihood amplitude estimation.
"""
