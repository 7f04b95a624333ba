"""Monte Carlo oracle for ``|S|``, ``U`` and ``M``.

Chunk ``i`` draws from a Philox stream keyed by ``(seed, i)`` alone, so the
output depends on ``(seq, n, seed, chunk)`` and never on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameters
from ..rearrange import IndependentSequence
from ..stepcurve import StepCurve
from .exact import _select

DEFAULT_CHUNK = 1 << 16
DEFAULT_DELTA = 1e-3
THREADS_ENV = "TAILSUM_THREADS"


def dkw_radius(n: int, delta: float) -> float:
    """Uniform band ``sqrt(ln(2/delta) / (2n))`` on an empirical distribution function."""
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidParameters(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


@dataclass(frozen=True)
class MCSummary:
    n: int
    seed: int
    chunk: int
    delta: float
    dkw_radius: float
    s_tail: StepCurve
    u_tail: StepCurve
    m_tail: StepCurve

    def curve(self, which: str) -> StepCurve:
        return _select(self, which)

    @property
    def resolution(self) -> float:
        """Smallest quantile level treated as resolved (10 samples above it)."""
        return 10.0 / self.n

    def config(self) -> dict:
        return {"n": self.n, "seed": self.seed, "chunk": self.chunk, "delta": self.delta}

    def same_as(self, other: "MCSummary") -> bool:
        return (self.config() == other.config() and self.s_tail == other.s_tail
                and self.u_tail == other.u_tail and self.m_tail == other.m_tail)


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def _simulate_chunk(seq: IndependentSequence, seed: int, index: int, size: int):
    rng = chunk_rng(seed, index)
    S = np.zeros(size)
    U = np.zeros(size)
    M = np.zeros(size)
    for d in seq.components:
        x = d.sample(rng, size)
        S += x
        np.maximum(U, np.abs(S), out=U)
        np.maximum(M, np.abs(x), out=M)
    # U >= |S| and M <= 2U hold replica by replica
    assert np.all(U >= np.abs(S))
    assert np.all(M <= 2.0 * U * (1 + 1e-12) + 1e-300)
    return np.abs(S), U, M


def simulate(seq: IndependentSequence, n: int, seed: int, delta: float = DEFAULT_DELTA,
             chunk: int = DEFAULT_CHUNK, workers: int | None = None,
             min_n: int = 1000) -> MCSummary:
    """Draw ``n`` replicas of the sequence and summarise the empirical tails."""
    if n < min_n:
        raise InvalidParameters(f"n must be at least {min_n}")
    if not 0 < delta <= 0.1:
        raise InvalidParameters("delta must lie in (0, 0.1]")
    if chunk < 1:
        raise InvalidParameters("chunk must be positive")
    workers = default_workers() if workers is None else max(1, int(workers))
    sizes = [min(chunk, n - i) for i in range(0, n, chunk)]
    jobs = list(enumerate(sizes))
    if workers == 1 or len(jobs) == 1:
        parts = [_simulate_chunk(seq, seed, i, m) for i, m in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _simulate_chunk(seq, seed, *job), jobs))
    s = np.concatenate([p[0] for p in parts])
    u = np.concatenate([p[1] for p in parts])
    m = np.concatenate([p[2] for p in parts])
    return MCSummary(
        n=n, seed=int(seed), chunk=chunk, delta=delta, dkw_radius=dkw_radius(n, delta),
        s_tail=StepCurve.from_samples(s),
        u_tail=StepCurve.from_samples(u),
        m_tail=StepCurve.from_samples(m),
    )


def sup_distance(a: StepCurve, b: StepCurve) -> float:
    """Exact ``sup_x |a(x) - b(x)|`` for two right-continuous step curves."""
    grid = np.union1d(a.xs, b.xs)
    return float(np.max(np.abs(a(grid) - b(grid))))
