"""Step-curve algebra over a finite independent sequence.

The disjoint-sum tail ``x -> sum_n Pr(|X_n| > x)`` and the maximum tail
``x -> Pr(max_n |X_n| > x)`` are both evaluated on the merged set of atom
magnitudes, so ``ell`` and ``max_star`` are exact step-function inverses.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .distmodel import LE, ComponentDistribution
from .errors import EmptySequence, FlagMismatch, InvalidParameters
from .stepcurve import LEFT, RIGHT, StepCurve, inverse

__all__ = [
    "LEFT", "RIGHT", "StepCurve", "inverse", "IndependentSequence", "LEVY_CONSTANTS",
    "ell", "max_star", "ell_lp_norm", "check_ell_max_chain", "ChainRow",
]

# Levy constants (c1, c2) per structure flag, in order of preference.
LEVY_CONSTANTS = {
    "positive": (1.0, 1.0),
    "symmetric": (1.0, 2.0),
    "iid": (7.0, 2.0),
}
# Alternative published pairs for identically distributed sequences.
IID_LEVY_ALTERNATIVES = ((5.0, 4.0), (7.0, 2.0), (10.0, 3.0))

FLAG_NAMES = ("positive", "symmetric", "iid")


def _flag_holds(name: str, components: Sequence[ComponentDistribution]) -> bool:
    if name == "positive":
        return all(c.is_positive() for c in components)
    if name == "symmetric":
        return all(c.is_symmetric() for c in components)
    if name == "iid":
        first = components[0]
        return all(c == first for c in components[1:])
    raise InvalidParameters(f"unknown flag {name!r}")


@dataclass(frozen=True, eq=False)
class IndependentSequence:
    """Ordered finite list of independent summands plus structure flags.

    Declared flags are validated against the atoms; ``levy_constants``
    defaults to the smallest registered pair among the flags that are set.
    """

    components: tuple
    positive: bool = False
    symmetric: bool = False
    iid: bool = False
    levy_constants: tuple | None = None

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise EmptySequence("a sequence needs at least one component")
        if not all(isinstance(c, ComponentDistribution) for c in comps):
            raise InvalidParameters("components must be ComponentDistribution instances")
        object.__setattr__(self, "components", comps)
        for name in FLAG_NAMES:
            if getattr(self, name) and not _flag_holds(name, comps):
                raise FlagMismatch(f"flag {name!r} declared but does not hold")
        if self.levy_constants is None:
            for name in FLAG_NAMES:
                if getattr(self, name):
                    object.__setattr__(self, "levy_constants", LEVY_CONSTANTS[name])
                    break
        else:
            c1, c2 = (float(x) for x in self.levy_constants)
            if not (c1 > 0 and c2 > 0):
                raise InvalidParameters("Levy constants must be positive")
            object.__setattr__(self, "levy_constants", (c1, c2))

    @classmethod
    def build(cls, components, flags: dict | None = None, levy_constants=None,
              infer: bool = True) -> "IndependentSequence":
        """Construct with flags inferred from the atoms.

        Flags explicitly set to ``True`` must hold (``FlagMismatch``
        otherwise); flags explicitly ``False`` are left off even if they hold.
        """
        comps = tuple(components)
        if not comps:
            raise EmptySequence("a sequence needs at least one component")
        flags = dict(flags or {})
        unknown = set(flags) - set(FLAG_NAMES)
        if unknown:
            raise InvalidParameters(f"unknown flags {sorted(unknown)}")
        resolved = {}
        for name in FLAG_NAMES:
            if name in flags:
                resolved[name] = bool(flags[name])
            else:
                resolved[name] = infer and _flag_holds(name, comps)
        return cls(comps, levy_constants=levy_constants, **resolved)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        if not isinstance(other, IndependentSequence):
            return NotImplemented
        return (self.components == other.components and self.flags == other.flags
                and self.levy_constants == other.levy_constants)

    def __hash__(self):
        return hash((self.components, tuple(self.flags.items()), self.levy_constants))

    def __repr__(self):
        on = [k for k, v in self.flags.items() if v]
        return f"IndependentSequence(N={len(self)}, flags={on}, levy={self.levy_constants})"

    @property
    def flags(self) -> dict:
        return {name: getattr(self, name) for name in FLAG_NAMES}

    @property
    def enumeration_size(self) -> int:
        size = 1
        for c in self.components:
            size *= c.values.size
        return size

    @cached_property
    def _unique(self):
        index: dict[ComponentDistribution, int] = {}
        order = []
        for c in self.components:
            order.append(index.setdefault(c, len(index)))
        return list(index), np.array(order)

    @cached_property
    def magnitude_grid(self) -> np.ndarray:
        uniq, _ = self._unique
        mags = np.concatenate([[0.0]] + [np.abs(c.values) for c in uniq])
        return np.unique(mags)

    @cached_property
    def _component_tails(self) -> np.ndarray:
        """Row ``n`` holds ``Pr(|X_n| > g)`` at every grid point ``g``."""
        uniq, order = self._unique
        g = self.magnitude_grid
        rows = np.vstack([c.tail_curve(g) for c in uniq])
        return rows[order]

    @cached_property
    def sum_tail(self) -> StepCurve:
        """``x -> sum_n Pr(|X_n| > x)``: the tail of the disjoint sum."""
        tails = self._component_tails
        s = np.zeros(tails.shape[1])
        for row in tails:
            s = s + row
        return StepCurve(self.magnitude_grid, s)

    @cached_property
    def max_tail(self) -> StepCurve:
        """``x -> Pr(max_n |X_n| > x)``.

        Accumulated as ``sum_n a_n prod_{m<n} (1 - a_m)`` in the same order as
        :attr:`sum_tail`; each term is at most ``a_n`` after rounding, so the
        result never exceeds the disjoint-sum tail bit for bit.
        """
        tails = self._component_tails
        m = np.zeros(tails.shape[1])
        survive = np.ones(tails.shape[1])
        for row in tails:
            m = m + row * survive
            survive = survive * (1.0 - row)
        # the telescoped sum can wobble by an ulp; a running minimum keeps it monotone
        m = np.minimum.accumulate(m)
        return StepCurve(self.magnitude_grid, m)

    def scaled(self, c: float) -> "IndependentSequence":
        if not c > 0:
            raise InvalidParameters("scale must be positive")
        return IndependentSequence(tuple(d.scaled(c) for d in self.components),
                                   levy_constants=self.levy_constants, **self.flags)

    def truncated(self, s: float, side: str = LE) -> "IndependentSequence":
        """Componentwise truncation; every structure flag survives truncation."""
        comps = tuple(d.truncate(s, side) for d in self.components)
        return IndependentSequence(comps, levy_constants=self.levy_constants, **self.flags)

    def max_abs(self) -> float:
        return float(self.magnitude_grid[-1])


def ell(seq: IndependentSequence, t: float) -> float:
    """Least ``x`` with ``sum_n Pr(|X_n| > x) <= t`` for ``t <= 1``; 0 for ``t > 1``."""
    if t < 0:
        raise InvalidParameters("t must be nonnegative")
    if t > 1:
        return 0.0
    return seq.sum_tail.inverse(t, RIGHT)


def ell_many(seq: IndependentSequence, t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    return np.where(t > 1, 0.0, seq.sum_tail.inverse(np.minimum(t, 1.0), RIGHT))


def max_star(seq: IndependentSequence, t: float) -> float:
    """Decreasing rearrangement of ``M = max_n |X_n|`` at ``t``."""
    if not 0 <= t <= 1:
        raise InvalidParameters("t must lie in [0, 1]")
    return seq.max_tail.inverse(t, RIGHT)


def ell_lp_norm(seq: IndependentSequence, p: float) -> float:
    """``(int_0^1 ell(t)^p dt)^(1/p)``, summed exactly over the step cells of ``ell``."""
    if not p > 0:
        raise InvalidParameters("p must be positive")
    return seq.sum_tail.lp_norm(p, cap=1.0)


class ChainRow(NamedTuple):
    t: float
    ell_2t: float
    ell_ratio: float
    mstar: float
    ell_t: float
    ok: bool


def check_ell_max_chain(seq: IndependentSequence, t_grid, slack: float = 0.0) -> list[ChainRow]:
    """Evaluate ``ell(2t) <= ell(t/(1-t)) <= M*(t) <= ell(t)`` at each ``t`` in (0, 1)."""
    rows = []
    for t in t_grid:
        t = float(t)
        if not 0 < t < 1:
            raise InvalidParameters("chain grid points must lie in (0, 1)")
        a = ell(seq, 2 * t)
        b = ell(seq, t / (1 - t))
        c = max_star(seq, t)
        d = ell(seq, t)
        ok = a <= b + slack and b <= c + slack and c <= d + slack
        rows.append(ChainRow(t, a, b, c, d, ok))
    return rows
