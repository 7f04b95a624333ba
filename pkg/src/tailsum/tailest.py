"""Tail-quantile estimators F1 and F2 for sums of independent real variables.

For ``0 < t < 1`` and a truncation level ``s``,

    F(t) = inf{lam > 0 : prod_n E t^( Y_n/lam) <= 1/t  and
                         prod_n E t^(-Y_n/lam) <= 1/t},   Y_n = X_n 1{|X_n| <= s},

with ``s = ell(t)`` for F1 and ``s = M*(t)`` for F2.  Writing ``a = ln(1/t)/lam``
the two products are ``E exp(-a S')`` and ``E exp(a S')``; their logs are
convex in ``a`` and vanish at 0, so the constraint is monotone in ``lam`` and
bisection applies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distmodel import LE, log_exp_moment
from .errors import InvalidParameters, NonConvergence
from .rearrange import IndependentSequence, ell, max_star

ELL = "ell"
MSTAR = "mstar"
MODES = (ELL, MSTAR)

MAX_ITER = 300
REL_TOL = 1e-9
# bisection stops well inside REL_TOL so lam*(1 - REL_TOL) is certified infeasible
_INNER_TOL = REL_TOL / 8


@dataclass(frozen=True)
class TailEstimate:
    t: float
    mode: str
    truncation_level: float
    lam: float
    bracket: tuple
    iterations: int

    @property
    def value(self) -> float:
        return self.lam

    def to_dict(self) -> dict:
        return {"t": self.t, "mode": self.mode, "truncation_level": self.truncation_level,
                "lambda": self.lam, "bracket": list(self.bracket), "iterations": self.iterations}


class _TruncatedSums:
    """Truncated laws at one level, stacked for a vectorized ``sum_n ln E e^{a Y_n}``."""

    def __init__(self, seq: IndependentSequence, trunc: float):
        uniq, order = seq._unique
        self.laws = [d.truncate(trunc, LE) for d in uniq]
        counts = np.bincount(order, minlength=len(uniq))
        self.is_zero = all(d.is_zero for d in self.laws)
        sizes = np.array([d.values.size for d in self.laws])
        self._starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
        self._seg = np.repeat(np.arange(len(self.laws)), sizes)
        self._v = np.concatenate([d.values for d in self.laws])
        self._logp = np.log(np.concatenate([d.probs for d in self.laws]))
        self._counts = counts.astype(np.float64)

    def _sum_log_mgf(self, a: float) -> float:
        z = a * self._v + self._logp
        m = np.maximum.reduceat(z, self._starts)
        s = np.add.reduceat(np.exp(z - m[self._seg]), self._starts)
        return float(np.dot(self._counts, m + np.log(s)))

    def log_g(self, a: float) -> float:
        if a == 0:
            return 0.0
        return max(self._sum_log_mgf(-a), self._sum_log_mgf(a))


def log_G(seq: IndependentSequence, t: float, trunc: float, lam: float) -> float:
    """``max(sum_n ln E e^{-a Y_n}, sum_n ln E e^{a Y_n})`` with ``a = ln(1/t)/lam``.

    The pair ``(t, lam)`` is feasible iff the result is ``<= ln(1/t)``.
    """
    if not 0 < t < 1:
        raise InvalidParameters("t must lie in (0, 1)")
    if not lam > 0:
        raise InvalidParameters("lambda must be positive")
    return _TruncatedSums(seq, trunc).log_g(math.log(1.0 / t) / lam)


def truncation_level(seq: IndependentSequence, t: float, mode: str) -> float:
    if mode == ELL:
        return ell(seq, t)
    if mode == MSTAR:
        return max_star(seq, t)
    raise InvalidParameters(f"mode must be one of {MODES}")


def tail_estimate(seq: IndependentSequence, t: float, mode: str = ELL) -> TailEstimate:
    """F1 (``mode='ell'``) or F2 (``mode='mstar'``) at level ``t``.

    Returns 0 for ``t >= 1`` and whenever the truncated sum is a.s. 0, and
    ``inf`` at ``t = 0`` otherwise.
    """
    if t < 0:
        raise InvalidParameters("t must be nonnegative")
    if mode not in MODES:
        raise InvalidParameters(f"mode must be one of {MODES}")
    if t >= 1:
        return TailEstimate(t, mode, 0.0, 0.0, (0.0, 0.0), 0)

    trunc = truncation_level(seq, t, mode)
    sums = _TruncatedSums(seq, trunc)
    if sums.is_zero:
        return TailEstimate(t, mode, trunc, 0.0, (0.0, 0.0), 0)
    if t == 0:
        # the constraint degenerates to "bounded by infinity" only in the limit
        return TailEstimate(t, mode, trunc, math.inf, (math.inf, math.inf), 0)
    lt = math.log(1.0 / t)

    def feasible(lam):
        return sums.log_g(lt / lam) <= lt

    it = 0
    hi = trunc if trunc > 0 else 1.0
    while not feasible(hi):
        hi *= 2.0
        it += 1
        if it > MAX_ITER:
            raise NonConvergence("no feasible upper bracket")
    lo = hi / 2.0
    while feasible(lo):
        hi, lo = lo, lo / 2.0
        it += 1
        if it > MAX_ITER:
            raise NonConvergence("no infeasible lower bracket")
    while hi - lo > _INNER_TOL * hi:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
        it += 1
        if it > MAX_ITER:
            raise NonConvergence("bisection exceeded the iteration cap")
    return TailEstimate(t, mode, trunc, hi, (lo, hi), it)


def tail_curve(seq: IndependentSequence, ts, mode: str = ELL) -> np.ndarray:
    return np.array([tail_estimate(seq, float(t), mode).lam for t in ts])


def F1(seq: IndependentSequence, t: float) -> float:
    return tail_estimate(seq, t, ELL).lam


def F2(seq: IndependentSequence, t: float) -> float:
    return tail_estimate(seq, t, MSTAR).lam
