"""Explicit upper-bound formulas: Klass-Nowicki and the disjoint-decomposition bounds.

Factorials and powers are handled in log space; ``inf`` is a legal bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InvalidParameters
from .rearrange import IndependentSequence, ell, ell_lp_norm

# Default for the unspecified constant of the decreasing-rearrangement form.
# Empirical: the verification suites report the smallest value that held.
DEFAULT_KN_C1 = 12.0


@dataclass(frozen=True)
class KNBoundInput:
    pU: float
    pM: float
    K: int

    def __post_init__(self):
        if not (0 <= self.pU <= 1 and 0 <= self.pM <= 1):
            raise InvalidParameters("pU and pM must be probabilities")
        if int(self.K) != self.K or self.K < 1:
            raise InvalidParameters("K must be a positive integer")


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def kn_rhs(inp: KNBoundInput) -> float:
    """``(1/K!) (pU / (1 - pU))^K + pM``."""
    pU, pM, K = inp.pU, inp.pM, int(inp.K)
    if pU >= 1:
        return math.inf
    if pU == 0:
        return pM
    log_term = K * (math.log(pU) - math.log1p(-pU)) - math.lgamma(K + 1)
    return _exp(log_term) + pM


def kn_decr_bound(Ustar_s: float, Mstar_half_t: float, t: float, s: float,
                  c1: float = DEFAULT_KN_C1) -> float:
    """``c1 log(1/t) / max{log(1/s), log log(4/t)} * (U*(s) + M*(t/2))`` for ``0 < t <= s <= 1/2``."""
    if not 0 < t <= s <= 0.5:
        raise DomainError("need 0 < t <= s <= 1/2")
    if not c1 > 0:
        raise InvalidParameters("c1 must be positive")
    mass = Ustar_s + Mstar_half_t
    if mass == 0:
        return 0.0
    factor = math.log(1.0 / t) / max(math.log(1.0 / s), math.log(math.log(4.0 / t)))
    return c1 * factor * mass


def vk_argument(t: float, r: float, k: int) -> float:
    """``t (k-1)! / r^(k-1)``, computed through ``lgamma``."""
    if t == 0:
        return 0.0
    return _exp(math.log(t) + math.lgamma(k) - (k - 1) * math.log(r))


def vk_tail_bound(seq: IndependentSequence, r: float, k: int, t: float) -> float:
    """``k * ell(t (k-1)! / r^(k-1))``: bound on the rearrangement of the k-th disjoint piece."""
    if not 0 < r < 1:
        raise InvalidParameters("r must lie in (0, 1)")
    if int(k) != k or k < 1:
        raise InvalidParameters("k must be a positive integer")
    if t < 0:
        raise InvalidParameters("t must be nonnegative")
    arg = vk_argument(t, r, int(k))
    return k * ell(seq, arg) if arg <= 1 else 0.0


def large_part_lp_bound(seq: IndependentSequence, r: float, p: float) -> float:
    """``2 exp(2^p r / p) ||ell||_p``; overflows to ``inf``."""
    if not 0 < r < 1:
        raise InvalidParameters("r must lie in (0, 1)")
    if not p > 0:
        raise InvalidParameters("p must be positive")
    norm = ell_lp_norm(seq, p)
    if norm == 0:
        return 0.0
    try:
        expo = 2.0**p * r / p
    except OverflowError:
        return math.inf
    return _exp(math.log(2.0) + expo + math.log(norm))
