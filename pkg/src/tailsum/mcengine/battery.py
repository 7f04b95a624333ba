"""Test sequences: random atomic corpora and the standard verification battery."""
from __future__ import annotations

import numpy as np

from ..distmodel import ContinuousFamilySpec, discretize, make_atomic, rademacher
from ..rearrange import IndependentSequence

# values drawn from this lattice collide often, exercising ties and merges
_LATTICE = np.array([-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0])


def random_component(rng: np.random.Generator, max_atoms: int):
    k = int(rng.integers(1, max_atoms + 1))
    if rng.random() < 0.5:
        values = rng.choice(_LATTICE, size=k)
    else:
        values = np.round(rng.normal(scale=rng.choice([0.1, 1.0, 10.0]), size=k), 3)
    probs = rng.dirichlet(np.ones(k))
    if rng.random() < 0.3:
        # leave a deficit that make_atomic pads at 0
        probs = probs * rng.uniform(0.2, 0.95)
    if rng.random() < 0.2:
        half = np.abs(values) + (np.abs(values) == 0)
        return make_atomic([(v, q / 2) for v, q in zip(half, probs)]
                           + [(-v, q / 2) for v, q in zip(half, probs)])
    return make_atomic(list(zip(values.tolist(), probs.tolist())))


def random_atomic_sequence(rng: np.random.Generator, max_n: int = 20,
                           max_atoms: int = 5) -> IndependentSequence:
    """Random finite sequence with ties, zeros, negatives and mass deficits."""
    n = int(rng.integers(1, max_n + 1))
    if rng.random() < 0.15:
        comps = [random_component(rng, max_atoms)] * n
    else:
        comps = [random_component(rng, max_atoms) for _ in range(n)]
    return IndependentSequence.build(comps)


def enumerable_corpus(count: int = 50, seed: int = 20240601, max_n: int = 6,
                      max_atoms: int = 4) -> list[IndependentSequence]:
    rng = np.random.default_rng(seed)
    return [random_atomic_sequence(rng, max_n, max_atoms) for _ in range(count)]


def _iid(d, n):
    return IndependentSequence.build([d] * n)


def _family(name, params, n):
    return _iid(discretize(ContinuousFamilySpec(name, params)), n)


def standard_battery() -> dict[str, IndependentSequence]:
    """Named sequences used by the tail and moment suites (N up to 100)."""
    bat = {}
    bat["rademacher_w1overn_20"] = IndependentSequence.build(
        [rademacher(1.0 / k) for k in range(1, 21)])
    bat["rademacher_w1oversqrtn_100"] = IndependentSequence.build(
        [rademacher(k ** -0.5) for k in range(1, 101)])
    bat["rademacher_iid_100"] = _iid(rademacher(), 100)
    # positive summands with atoms on a geometric ladder
    ladder = 2.0 ** np.arange(5)
    geo = []
    for k in range(30):
        w = 0.5 ** np.arange(1, 6) * 0.8
        geo.append(make_atomic([(float(v * (1 + k % 3)), float(q)) for v, q in zip(ladder, w)]))
    bat["positive_geometric_30"] = IndependentSequence.build(geo)
    bat["gaussian_iid_10"] = _family("gaussian", (0.0, 1.0), 10)
    bat["gaussian_iid_100"] = _family("gaussian", (0.0, 1.0), 100)
    bat["exponential_iid_20"] = _family("exponential", (1.0,), 20)
    bat["exponential_iid_100"] = _family("exponential", (1.0,), 100)
    bat["pareto3_iid_20"] = _family("pareto", (3.0, 1.0), 20)
    bat["pareto3_iid_100"] = _family("pareto", (3.0, 1.0), 100)
    mixed = []
    for k in range(40):
        a = 10.0 ** (k % 5 - 2)
        mixed.append(make_atomic([(-a, 0.25), (0.0, 0.5), (a, 0.25)]) if k % 2
                     else rademacher(a))
    bat["mixed_scale_symmetric_40"] = IndependentSequence.build(mixed)
    bat["sparse_symmetric_iid_100"] = _iid(make_atomic([(-1.0, 0.01), (1.0, 0.01)]), 100)
    bat["sparse_bernoulli_weighted_50"] = IndependentSequence.build(
        [make_atomic([(1.5 ** (k % 10), 0.05)]) for k in range(50)])
    return bat
