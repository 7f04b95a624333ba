"""Single-constant fits of the two-sided equivalence between decreasing curves.

``f`` and ``g`` are equivalent with constant ``c`` on a grid when

    f(min(c t, 1)) / c <= g(t) <= c f(t / c)     for every grid t.

For a nonincreasing ``f`` both sides relax as ``c`` grows, so each grid point
has a least admissible ``c`` and the fitted constant is their maximum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParameters, NoFit
from ..stepcurve import StepCurve

C_MAX = 1e4
C_RATIO = 1.05
REFINE_TOL = 1e-3


@dataclass(frozen=True)
class FitResult:
    c: float
    witness_t: float
    grid: tuple
    c_grid: float = field(default=math.nan)

    def to_dict(self) -> dict:
        return {"c": self.c, "c_grid": self.c_grid, "witness_t": self.witness_t,
                "grid": list(self.grid)}


def geometric_grid(lo: float = 1e-4, hi: float = 0.5, n: int = 40) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def empirical_quantile(source, which: str, t: float) -> float:
    """Right inverse of the selected tail (``S``, ``U`` or ``M``); 0 for ``t >= 1``."""
    if not 0 <= t <= 1:
        raise InvalidParameters("t must lie in [0, 1]")
    return source.curve(which).rearrangement(t)


class _Memo:
    """Scalar-callable wrapper with a cache; StepCurves are read as rearrangements."""

    def __init__(self, f):
        if isinstance(f, StepCurve):
            self._f = f.rearrangement
        elif callable(f):
            self._f = f
        else:
            raise InvalidParameters("curve must be a StepCurve or a callable")
        self._cache: dict[float, float] = {}

    def __call__(self, t: float) -> float:
        t = float(t)
        v = self._cache.get(t)
        if v is None:
            v = float(self._f(t))
            self._cache[t] = v
        return v


def _lower_ok(f, gt, t, c):
    return f(min(c * t, 1.0)) / c <= gt


def _upper_ok(f, gt, t, c):
    return gt <= c * f(t / c)


def fit_constants(f, g, t_grid, c_max: float = C_MAX, ratio: float = C_RATIO,
                  refine: bool = True) -> FitResult:
    """Least ``c`` making ``f`` and ``g`` equivalent on ``t_grid``.

    The search runs over the geometric grid ``ratio**k <= c_max`` and, with
    ``refine``, bisects the last grid step down to relative 1e-3.  Raises
    :class:`NoFit` if no grid value up to ``c_max`` works.
    """
    grid = np.asarray(t_grid, dtype=np.float64)
    if grid.size == 0 or np.any(grid <= 0) or np.any(grid >= 1):
        raise InvalidParameters("grid must be a nonempty subset of (0, 1)")
    fm, gm = _Memo(f), _Memo(g)
    gvals = [gm(t) for t in grid]
    cs = ratio ** np.arange(int(math.floor(math.log(c_max) / math.log(ratio))) + 1)

    def ok_at(i, c):
        t, gt = grid[i], gvals[i]
        return _lower_ok(fm, gt, t, c) and _upper_ok(fm, gt, t, c)

    # per grid point: least admissible grid index (feasibility is monotone in c)
    need = 0
    witness = float(grid[0])
    for i in range(grid.size):
        if ok_at(i, cs[need]):
            continue
        if not ok_at(i, cs[-1]):
            raise NoFit(f"no constant up to {c_max:g} fits at t={grid[i]:.4g}")
        lo, hi = need, cs.size - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok_at(i, cs[mid]):
                hi = mid
            else:
                lo = mid
        need = hi
        witness = float(grid[i])

    c_grid = float(cs[need])
    c = c_grid
    if refine and need > 0:
        lo, hi = float(cs[need - 1]), c_grid

        def all_ok(cc):
            return all(ok_at(i, cc) for i in range(grid.size))

        while hi / lo - 1 > REFINE_TOL:
            mid = math.sqrt(lo * hi)
            if all_ok(mid):
                hi = mid
            else:
                lo = mid
        c = hi
        for i in range(grid.size):
            if not ok_at(i, lo):
                witness = float(grid[i])
                break
    return FitResult(c=c, witness_t=witness, grid=tuple(grid.tolist()), c_grid=c_grid)
