import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tailsum.distmodel import (GT, LE, ContinuousFamilySpec, discretize, log_exp_moment,
                               make_atomic, point_mass, quantile_at, rademacher, sample,
                               tail_at, truncate)
from tailsum.errors import InvalidParameters, NegativeProb, TotalMassExceedsOne

import oracles
from strategies import distributions

EXAMPLE = make_atomic([(3, 0.2), (1, 0.5), (0, 0.3)])


class TestMakeAtomic:
    def test_rademacher(self):
        d = make_atomic([(1, 0.5), (-1, 0.5)])
        assert d.atoms == [(-1.0, 0.5), (1.0, 0.5)]
        assert d == rademacher()

    def test_deficit_padded_at_zero(self):
        assert make_atomic([(5, 0.3)]).atoms == [(0.0, 0.7), (5.0, 0.3)]

    def test_excess_mass(self):
        with pytest.raises(TotalMassExceedsOne):
            make_atomic([(1, 0.6), (1, 0.6)])

    def test_nonpositive_prob(self):
        with pytest.raises(NegativeProb):
            make_atomic([(1, 0.5), (2, 0.0)])
        with pytest.raises(NegativeProb):
            make_atomic([(1, -0.1)])

    def test_merge_and_negative_zero(self):
        d = make_atomic([(-0.0, 0.25), (0.0, 0.25), (2, 0.5)])
        assert d.atoms == [(0.0, 0.5), (2.0, 0.5)]

    def test_nonfinite_value(self):
        with pytest.raises(InvalidParameters):
            make_atomic([(math.inf, 1.0)])

    @given(distributions)
    def test_total_mass(self, d):
        assert abs(math.fsum(d.probs) - 1.0) <= 1e-12
        assert np.all(np.diff(d.values) > 0)
        assert np.all(d.probs > 0)


class TestTailAndQuantile:
    def test_tail_examples(self):
        assert tail_at(EXAMPLE, 0) == pytest.approx(0.7)
        assert tail_at(EXAMPLE, 1) == pytest.approx(0.2)
        assert tail_at(EXAMPLE, 3) == 0

    def test_quantile_examples(self):
        assert quantile_at(EXAMPLE, 0.1) == 3
        assert quantile_at(EXAMPLE, 0.2) == 1
        assert quantile_at(EXAMPLE, 0.7) == 0

    @given(distributions, st.floats(0, 60))
    def test_tail_matches_oracle(self, d, x):
        assert tail_at(d, x) == pytest.approx(oracles.tail(d.atoms, x), abs=1e-15)

    @given(distributions)
    def test_monotone_and_right_continuous(self, d):
        mags = np.unique(np.abs(d.values))
        vals = [tail_at(d, x) for x in mags]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        for x in mags:
            assert tail_at(d, x) == pytest.approx(oracles.tail(d.atoms, x), abs=1e-15)

    @given(distributions)
    def test_galois(self, d):
        mags = np.unique(np.concatenate([[0.0], np.abs(d.values)]))
        levels = np.unique(np.concatenate([[0.0, 1.0], d.tail_curve.vals]))
        for u in levels:
            for x in mags:
                assert (quantile_at(d, u) <= x) == (tail_at(d, x) <= u)


class TestTruncate:
    def test_examples(self):
        d = make_atomic([(0, 0.7), (5, 0.3)])
        assert truncate(d, 2, LE).atoms == [(0.0, 1.0)]
        assert truncate(d, 5, LE) == d
        assert truncate(rademacher(), 0.5, GT) == rademacher()

    @given(distributions, st.floats(0, 60))
    def test_conservation(self, d, s):
        low, high = truncate(d, s, LE), truncate(d, s, GT)
        lowm, highm = dict(low.atoms), dict(high.atoms)
        for v, p in d.atoms:
            if v == 0:
                continue
            assert lowm.get(v, 0.0) + highm.get(v, 0.0) == p
        assert abs(math.fsum(low.probs) - 1) <= 1e-12
        assert abs(math.fsum(high.probs) - 1) <= 1e-12

    def test_negative_level(self):
        with pytest.raises(InvalidParameters):
            truncate(rademacher(), -1.0)


class TestLogExpMoment:
    def test_examples(self):
        assert log_exp_moment(rademacher(), 1.0) == pytest.approx(math.log(math.cosh(1.0)), rel=1e-14)
        assert log_exp_moment(EXAMPLE, 0.0) == 0.0
        assert log_exp_moment(point_mass(2.5), -3.0) == pytest.approx(-7.5)

    def test_no_overflow(self):
        assert log_exp_moment(rademacher(), 700.0) == pytest.approx(700 - math.log(2), rel=1e-12)
        assert math.isfinite(log_exp_moment(rademacher(10.0), 300.0))

    @given(distributions, st.floats(-5, 5))
    def test_matches_mpmath(self, d, a):
        with mpmath.workdps(30):
            ref = mpmath.log(mpmath.fsum(p * mpmath.exp(a * v) for v, p in d.atoms))
        assert log_exp_moment(d, a) == pytest.approx(float(ref), rel=1e-10, abs=1e-12)

    @given(distributions)
    def test_convex(self, d):
        grid = np.linspace(-3, 3, 13)
        vals = [log_exp_moment(d, a) for a in grid]
        for i in range(1, len(grid) - 1):
            assert vals[i] <= 0.5 * (vals[i - 1] + vals[i + 1]) + 1e-10


class TestSample:
    def test_point_mass(self):
        rng = np.random.default_rng(1)
        assert np.all(point_mass(1.0).sample(rng, 100) == 1.0)
        assert sample(point_mass(1.0), rng) == 1.0

    def test_rademacher_mean(self):
        x = rademacher().sample(np.random.default_rng(7), 10**5)
        assert abs(x.mean()) <= 3 / math.sqrt(1e5)
        assert set(np.unique(x)) == {-1.0, 1.0}

    def test_deterministic(self):
        a = EXAMPLE.sample(np.random.default_rng(3), 1000)
        b = EXAMPLE.sample(np.random.default_rng(3), 1000)
        assert np.array_equal(a, b)

    def test_frequencies(self):
        x = EXAMPLE.sample(np.random.default_rng(11), 10**5)
        for v, p in EXAMPLE.atoms:
            assert abs(np.mean(x == v) - p) < 0.01


class TestDiscretize:
    def test_constant_family(self):
        assert discretize(ContinuousFamilySpec("uniform", (2.0, 2.0))).atoms == [(2.0, 1.0)]

    def test_uniform_quarters(self):
        d = discretize(ContinuousFamilySpec("uniform", (0.0, 1.0), eps_mass=0.25, eps_value=1.0))
        assert np.allclose(d.values, [0.125, 0.375, 0.625, 0.875], atol=1e-12)
        assert np.allclose(d.probs, 0.25, atol=1e-12)

    def test_gaussian_tail_accuracy(self):
        spec = ContinuousFamilySpec("gaussian", (0.0, 1.0), eps_mass=1e-4)
        d = discretize(spec)
        xs = np.unique(np.concatenate([np.abs(d.values), np.linspace(0, 6, 601)]))
        err = 0.0
        for x in xs[::7]:
            exact = float(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)))
            err = max(err, abs(tail_at(d, x) - exact))
        assert err <= 1e-4

    @pytest.mark.parametrize("family,params", [
        ("exponential", (2.0,)), ("pareto", (3.0, 1.0)), ("uniform", (-1.0, 3.0)),
        ("weibull", (1.5, 2.0)), ("gaussian", (1.0, 2.0)),
    ])
    def test_families_within_eps(self, family, params):
        spec = ContinuousFamilySpec(family, params, eps_mass=1e-3, eps_value=0.05)
        d = discretize(spec)
        assert np.all(d.probs <= 1e-3 + 1e-12)
        xs = np.unique(np.concatenate([np.abs(d.values), np.abs(d.values) * (1 - 1e-9)]))
        gap = np.max(np.abs(d.tail_curve(xs) - spec.exact_tail(xs)))
        assert gap <= 1e-3

    def test_bad_params(self):
        with pytest.raises(InvalidParameters):
            ContinuousFamilySpec("gaussian", (0.0, -1.0))
        with pytest.raises(InvalidParameters):
            ContinuousFamilySpec("cauchy", (0.0, 1.0))
        with pytest.raises(InvalidParameters):
            ContinuousFamilySpec("gaussian", (0.0, 1.0), eps_mass=0.0)
