"""Brute-force enumeration of the full outcome space of a small sequence."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EnumTooLarge
from ..rearrange import IndependentSequence
from ..stepcurve import StepCurve

ENUM_LIMIT = 2_000_000


@dataclass(frozen=True)
class Outcomes:
    """One entry per joint outcome of ``(X_1, ..., X_N)``."""

    prob: np.ndarray
    S: np.ndarray          # signed final sum
    U: np.ndarray          # max_k |S_k|
    M: np.ndarray          # max_n |X_n|
    nonzero: np.ndarray    # number of n with X_n != 0
    partial_tails: tuple   # tail curve of |S_k| for k = 1..N


@dataclass(frozen=True)
class ExactJoint:
    s_tail: StepCurve
    u_tail: StepCurve
    m_tail: StepCurve
    partial_tails: tuple
    outcome_count: int

    def curve(self, which: str) -> StepCurve:
        return _select(self, which)

    def to_dict(self) -> dict:
        return {"outcome_count": self.outcome_count,
                "S": self.s_tail.to_dict(), "U": self.u_tail.to_dict(), "M": self.m_tail.to_dict(),
                "partial": [c.to_dict() for c in self.partial_tails]}


def _select(obj, which: str) -> StepCurve:
    key = which.upper()
    if key == "S":
        return obj.s_tail
    if key == "U":
        return obj.u_tail
    if key == "M":
        return obj.m_tail
    raise ValueError(f"which must be S, U or M, got {which!r}")


def enumerate_outcomes(seq: IndependentSequence, limit: int = ENUM_LIMIT) -> Outcomes:
    size = seq.enumeration_size
    if size > limit:
        raise EnumTooLarge(f"{size} joint outcomes exceed the enumeration limit {limit}")
    prob = np.ones(1)
    S = np.zeros(1)
    U = np.zeros(1)
    M = np.zeros(1)
    nz = np.zeros(1, dtype=np.int64)
    partial = []
    for d in seq.components:
        v, p = d.values, d.probs
        k = v.size
        prob = (prob[:, None] * p[None, :]).ravel()
        # same operation order as the Monte Carlo engine: S += x, U = max(U, |S|)
        S = (S[:, None] + v[None, :]).ravel()
        U = np.maximum(np.repeat(U, k), np.abs(S))
        M = np.maximum(np.repeat(M, k), np.tile(np.abs(v), U.size // k))
        nz = np.repeat(nz, k) + np.tile((v != 0).astype(np.int64), U.size // k)
        partial.append(StepCurve.from_masses(S, prob))
    return Outcomes(prob, S, U, M, nz, tuple(partial))


def enumerate_exact(seq: IndependentSequence, limit: int = ENUM_LIMIT) -> ExactJoint:
    """Exact tails of ``|S|``, ``U``, ``M`` and every ``|S_k|`` by full enumeration."""
    out = enumerate_outcomes(seq, limit)
    return ExactJoint(
        s_tail=out.partial_tails[-1],
        u_tail=StepCurve.from_masses(out.U, out.prob),
        m_tail=StepCurve.from_masses(out.M, out.prob),
        partial_tails=out.partial_tails,
        outcome_count=int(out.prob.size),
    )
