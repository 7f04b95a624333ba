import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tailsum.distmodel import make_atomic, point_mass, rademacher
from tailsum.errors import DomainError
from tailsum.orlicz import phi_norm, phi_t, sup_formula

import oracles
from strategies import distributions

T_VALUES = st.sampled_from([0.25, 0.1, 0.01, 1e-4])


def test_phi_t_normalisation():
    for t in (0.25, 0.1, 1e-3):
        assert phi_t(0.0, t) == 0.0
        assert phi_t(1.0, t) == pytest.approx(1.0, rel=1e-14)
        x = np.linspace(0, 3, 31)
        assert np.all(np.diff(phi_t(x, t), 2) >= -1e-12)


def test_examples():
    assert phi_norm(point_mass(1.0), 0.1) == pytest.approx(1.0, rel=1e-9)
    assert phi_norm(point_mass(0.0), 0.1) == 0.0
    assert sup_formula(point_mass(1.0), 0.1) == pytest.approx(1.0)
    assert sup_formula(point_mass(0.0), 0.1) == 0.0
    assert sup_formula(rademacher(), 0.1) == pytest.approx(1.0)


def test_domain():
    with pytest.raises(DomainError):
        phi_norm(rademacher(), 0.3)
    with pytest.raises(DomainError):
        sup_formula(rademacher(), 0.0)


@given(distributions, T_VALUES)
def test_matches_definition(d, t):
    assert phi_norm(d, t) == pytest.approx(oracles.orlicz_norm(d.atoms, t), rel=2e-9, abs=1e-12)


@given(distributions, T_VALUES, st.floats(0.1, 10))
def test_homogeneous(d, t, c):
    assert phi_norm(d.scaled(c), t) == pytest.approx(c * phi_norm(d, t), rel=1e-8, abs=1e-12)


@given(distributions, T_VALUES)
def test_sandwich(d, t):
    s, n = sup_formula(d, t), phi_norm(d, t)
    if s == 0:
        assert n == 0
    else:
        assert 0.5 / 1.01 <= n / s <= 2 * 1.01


@given(distributions, T_VALUES, st.floats(1.0, 3.0))
def test_monotone_in_rearrangement(d, t, c):
    # |X| scaled up atom by atom dominates |X| pointwise in rearrangement
    bigger = make_atomic([(abs(v) * c + 0.1, p) for v, p in d.atoms])
    assert phi_norm(d, t) <= phi_norm(bigger, t) + 1e-8


def test_sup_formula_weight_at_cells():
    d = make_atomic([(4.0, 0.01), (1.0, 0.49)])
    t = 0.1
    lt = math.log(10)
    w = lambda x: lt / (math.log(1 / x) + lt)  # noqa: E731
    assert sup_formula(d, t) == pytest.approx(max(4 * w(0.01), 1 * w(0.5)))
