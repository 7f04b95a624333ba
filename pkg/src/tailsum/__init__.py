"""Tail and moment estimates for sums of independent random variables."""
__version__ = "0.1.0"

from .distmodel import (ComponentDistribution, ContinuousFamilySpec, discretize, make_atomic,
                        point_mass, rademacher)
from .errors import TailsumError
from .rearrange import IndependentSequence, ell, ell_lp_norm, max_star
from .tailest import F1, F2, tail_estimate

__all__ = [
    "__version__", "ComponentDistribution", "ContinuousFamilySpec", "discretize", "make_atomic",
    "point_mass", "rademacher", "TailsumError", "IndependentSequence", "ell", "ell_lp_norm",
    "max_star", "F1", "F2", "tail_estimate",
]
