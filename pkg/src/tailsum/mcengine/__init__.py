"""Oracles (exact enumeration, Monte Carlo), constant fitting and verification suites."""
from .exact import ENUM_LIMIT, ExactJoint, Outcomes, enumerate_exact, enumerate_outcomes
from .fitting import FitResult, empirical_quantile, fit_constants, geometric_grid
from .montecarlo import MCSummary, dkw_radius, simulate, sup_distance

__all__ = [
    "ENUM_LIMIT", "ExactJoint", "Outcomes", "enumerate_exact", "enumerate_outcomes",
    "FitResult", "empirical_quantile", "fit_constants", "geometric_grid",
    "MCSummary", "dkw_radius", "simulate", "sup_distance",
]
