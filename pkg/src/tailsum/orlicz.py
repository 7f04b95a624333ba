"""Orlicz norms for ``Phi_t(x) = (t^-x - 1) / (t^-1 - 1)`` and their sup-formula equivalent."""
from __future__ import annotations

import math

import numpy as np

from .distmodel import ComponentDistribution, log_exp_moment
from .errors import DomainError, NonConvergence

MAX_ITER = 200
REL_TOL = 1e-9


def _check_t(t: float) -> None:
    if not 0 < t <= 0.25:
        raise DomainError("t must lie in (0, 1/4]")


def phi_t(x, t: float):
    """``Phi_t(x)``: convex, ``Phi_t(0) = 0`` and ``Phi_t(1) = 1``."""
    _check_t(t)
    x = np.asarray(x, dtype=np.float64)
    lt = math.log(1.0 / t)
    return np.expm1(lt * x) / math.expm1(lt)


def _feasible(absd: ComponentDistribution, lt: float, lam: float) -> bool:
    # E Phi_t(|X|/lam) <= 1  <=>  ln E exp(ln(1/t) |X| / lam) <= ln(1/t)
    return log_exp_moment(absd, lt / lam) <= lt


def phi_norm(d: ComponentDistribution, t: float) -> float:
    """``inf{lam > 0 : E Phi_t(|X| / lam) <= 1}`` by bisection on ``lam``.

    ``lam = max|X|`` is always feasible, so the bracket is found by halving
    from there.  Relative tolerance 1e-9.
    """
    _check_t(t)
    if d.is_zero:
        return 0.0
    absd = d.abs()
    lt = math.log(1.0 / t)
    hi = absd.max_abs
    it = 0
    while not _feasible(absd, lt, hi):
        hi *= 2.0
        it += 1
        if it > MAX_ITER:
            raise NonConvergence("no feasible upper bracket for phi_norm")
    lo = hi / 2.0
    while _feasible(absd, lt, lo):
        hi, lo = lo, lo / 2.0
        it += 1
        if it > MAX_ITER:
            raise NonConvergence("no infeasible lower bracket for phi_norm")
    while hi - lo > REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if _feasible(absd, lt, mid):
            hi = mid
        else:
            lo = mid
        it += 1
        if it > MAX_ITER:
            raise NonConvergence("phi_norm bisection exceeded the iteration cap")
    return hi


def sup_formula(d: ComponentDistribution, t: float) -> float:
    """``sup_{0<=x<=1} ln(1/t) / (ln(1/x) + ln(1/t)) * X*(x)``.

    ``X*`` equals ``xs[j+1]`` on ``[v_{j+1}, v_j)`` where ``v`` are the tail
    values; the weight increases in ``x`` so each cell contributes its value
    times the weight at the cell's right end.
    """
    _check_t(t)
    curve = d.tail_curve
    widths, heights = curve.cells(cap=1.0)
    if widths.size == 0:
        return 0.0
    right_ends = np.minimum(curve.vals, 1.0)
    right_ends = right_ends[:-1][(right_ends[:-1] - right_ends[1:]) > 0]
    lt = math.log(1.0 / t)
    weights = lt / (np.log(1.0 / right_ends) + lt)
    return float(np.max(weights * heights))
