"""Nonincreasing right-continuous step functions on [0, inf).

A ``StepCurve`` stores breakpoints ``xs`` (strictly increasing, starting at 0)
and values ``vals`` (nonincreasing); ``curve(y) = vals[i]`` for
``xs[i] <= y < xs[i+1]`` and ``vals[-1]`` beyond the last breakpoint.  Tails
``y -> Pr(|X| > y)``, the disjoint-sum tail and empirical tails all use it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RIGHT = "right"
LEFT = "left"


@dataclass(frozen=True, eq=False)
class StepCurve:
    xs: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        xs = np.ascontiguousarray(self.xs, dtype=np.float64)
        vals = np.ascontiguousarray(self.vals, dtype=np.float64)
        if xs.ndim != 1 or xs.shape != vals.shape or xs.size == 0:
            raise ValueError("xs and vals must be nonempty 1-D arrays of equal length")
        if xs[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(vals) > 0):
            raise ValueError("values must be nonincreasing")
        if np.any(vals < 0):
            raise ValueError("values must be nonnegative")
        xs.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "vals", vals)

    @classmethod
    def from_masses(cls, magnitudes, masses) -> "StepCurve":
        """Tail curve ``y -> sum(masses[magnitudes > y])`` of a nonnegative variable.

        Masses at equal magnitudes are merged.  Suffix sums are accumulated from
        the largest magnitude down so every tail evaluation of the same atoms is
        bit-identical no matter which caller builds the curve.
        """
        mags = np.abs(np.asarray(magnitudes, dtype=np.float64))
        w = np.asarray(masses, dtype=np.float64)
        order = np.argsort(mags, kind="stable")
        mags, w = mags[order], w[order]
        uniq, start = np.unique(mags, return_index=True)
        per = np.add.reduceat(w, start) if w.size else np.zeros(0)
        # suffix[i] = mass strictly above uniq[i-1]
        suffix = np.concatenate([np.cumsum(per[::-1])[::-1], [0.0]])
        if uniq.size and uniq[0] == 0.0:
            xs = uniq
            vals = suffix[1:]
        else:
            xs = np.concatenate([[0.0], uniq])
            vals = suffix
        return cls(xs, vals)

    @classmethod
    def from_samples(cls, samples) -> "StepCurve":
        """Empirical tail of ``|samples|``: ``y -> #{|x_i| > y} / n``."""
        a = np.sort(np.abs(np.asarray(samples, dtype=np.float64)))
        n = a.size
        if n == 0:
            raise ValueError("need at least one sample")
        uniq = np.unique(a)
        above = n - np.searchsorted(a, uniq, side="right")
        if uniq[0] == 0.0:
            xs, vals = uniq, above / n
        else:
            xs = np.concatenate([[0.0], uniq])
            vals = np.concatenate([[1.0], above / n])
        return cls(xs, vals)

    @classmethod
    def constant(cls, value: float) -> "StepCurve":
        return cls(np.array([0.0]), np.array([float(value)]))

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        idx = np.searchsorted(self.xs, y, side="right") - 1
        out = self.vals[np.clip(idx, 0, None)]
        return float(out) if out.ndim == 0 else out

    def inverse(self, x, side: str = RIGHT):
        """Right inverse ``sup{y : f(y) > x}`` or left inverse ``sup{y : f(y) >= x}``.

        ``sup`` of the empty set is 0; an unbounded set gives ``inf``.
        """
        x = np.asarray(x, dtype=np.float64)
        neg = -self.vals
        if side == RIGHT:
            k = np.searchsorted(neg, -x, side="left")
        elif side == LEFT:
            k = np.searchsorted(neg, -x, side="right")
        else:
            raise ValueError(f"side must be 'right' or 'left', got {side!r}")
        n = self.xs.size
        out = np.where(k == 0, 0.0, self.xs[np.minimum(k, n - 1)])
        out = np.where(k >= n, np.inf, out)
        return float(out) if out.ndim == 0 else out

    def rearrangement(self, t):
        """Decreasing rearrangement ``t -> curve^{-1}(t+)``; 0 for ``t >= 1``.

        Only meaningful for probability tails; the disjoint-sum tail uses
        :meth:`inverse` directly because its values may exceed 1.
        """
        t = np.asarray(t, dtype=np.float64)
        out = np.where(t >= 1.0, 0.0, self.inverse(t, RIGHT))
        return float(out) if out.ndim == 0 else out

    def cells(self, cap: float = 1.0):
        """(width, height) pairs of the rearrangement restricted to ``[0, cap]``.

        The rearrangement equals ``xs[j+1]`` on ``[vals[j+1], vals[j])``.
        """
        v = np.minimum(self.vals, cap)
        if v[-1] > 0:
            widths = np.concatenate([v[:-1] - v[1:], [v[-1]]])
            heights = np.concatenate([self.xs[1:], [np.inf]])
        else:
            widths = v[:-1] - v[1:]
            heights = self.xs[1:]
        keep = widths > 0
        return widths[keep], heights[keep]

    def lp_norm(self, p: float, cap: float = 1.0) -> float:
        """``(int_0^cap f*(t)^p dt)^(1/p)`` as an exact sum over step cells."""
        if p <= 0:
            raise ValueError("p must be positive")
        widths, heights = self.cells(cap)
        if widths.size == 0:
            return 0.0
        if np.isinf(heights).any():
            return np.inf
        hmax = heights.max()
        if hmax == 0:
            return 0.0
        # factor out the largest height to keep h**p finite for large p
        total = np.sum(widths * (heights / hmax) ** p)
        return float(hmax * total ** (1.0 / p))

    def __eq__(self, other):
        if not isinstance(other, StepCurve):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.vals, other.vals)

    def __hash__(self):
        return hash((self.xs.tobytes(), self.vals.tobytes()))

    def __repr__(self):
        return f"StepCurve(n={self.xs.size}, head={list(zip(self.xs[:3], self.vals[:3]))})"

    def to_dict(self) -> dict:
        return {"x": self.xs.tolist(), "value": self.vals.tolist()}


def inverse(curve: StepCurve, x: float, side: str = RIGHT) -> float:
    """Functional form of :meth:`StepCurve.inverse`."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    return curve.inverse(x, side)
