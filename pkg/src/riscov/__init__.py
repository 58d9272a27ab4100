"""LOS coverage of cellular networks with roadside RISs.

Two engines over one stochastic-geometry model: a Monte Carlo simulator
(``montecarlo``) and quadrature evaluation of the coverage formulas
(``analytic``).
"""

from .analytic import AnalyticOptions, cov_handset, cov_no_ris, cov_total, cov_vehicle, outage_gain, outage_ratio
from .montecarlo import CoverageEstimate, SimConfig, estimate_handset, estimate_no_ris, estimate_total, estimate_vehicle
from .params import LinkBudget, NetworkParams, ParameterError, Thresholds, derived_thresholds, gamma_from_budget

__all__ = [
    "AnalyticOptions", "CoverageEstimate", "LinkBudget", "NetworkParams", "ParameterError", "SimConfig",
    "Thresholds", "cov_handset", "cov_no_ris", "cov_total", "cov_vehicle", "derived_thresholds",
    "estimate_handset", "estimate_no_ris", "estimate_total", "estimate_vehicle", "gamma_from_budget",
    "outage_gain", "outage_ratio",
]
