import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropic_nc.entropy import (
    PairDistribution,
    binary_entropy,
    conditional_entropy,
    joint_entropy,
    marginal,
    pair_entropy,
    shannon_entropy,
)
from entropic_nc.exceptions import InvalidDistribution, OutOfRange

probs = st.floats(0, 1, allow_nan=False)


@pytest.mark.parametrize(
    "dist,expected",
    [
        ((1, 0, 0), 0.0),
        ((0.5, 0.25, 0.25), 1.5),
        ((1 / 3, 1 / 3, 1 / 3), 1.584962500721156),
        ((0.25,) * 4, 2.0),
    ],
)
def test_shannon_entropy_values(dist, expected):
    assert shannon_entropy(dist) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [(0.5, 0.6), (1.1, -0.1), (np.nan, 1.0), ()])
def test_shannon_entropy_rejects(bad):
    with pytest.raises(InvalidDistribution):
        shannon_entropy(bad)


def test_tiny_roundoff_is_clamped():
    assert shannon_entropy([1 + 5e-13, -5e-13]) == 0.0


def test_binary_entropy_values():
    assert binary_entropy(0) == 0
    assert binary_entropy(1) == 0
    assert binary_entropy(0.5) == 1
    # 1 - 0.89 != 0.11 in binary floating point, so equality is to the last ulp
    assert binary_entropy(0.11) == pytest.approx(binary_entropy(0.89), abs=1e-15)


@given(probs)
def test_binary_entropy_symmetric_and_bounded(p):
    h = binary_entropy(p)
    assert 0 <= h <= 1
    assert h == pytest.approx(binary_entropy(1 - p), abs=1e-12)


@pytest.mark.parametrize("bad", [-0.01, 1.01, math.nan])
def test_binary_entropy_out_of_range(bad):
    with pytest.raises(OutOfRange):
        binary_entropy(bad)


def test_pair_entropy():
    assert pair_entropy(PairDistribution(1, 0, 0)) == 0
    assert pair_entropy(PairDistribution(1 / 3, 1 / 3, 1 / 3)) == pytest.approx(math.log2(3), abs=1e-15)


def test_pair_distribution_invariants():
    with pytest.raises(InvalidDistribution):
        PairDistribution(0.5, 0.5, 0.5)
    pd = PairDistribution(0.2, 0.3, 0.5, index=4)
    assert pd.p_pp == 0
    np.testing.assert_array_equal(pd.table(), [[0.2, 0.3], [0.5, 0.0]])


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12))
def test_entropy_bounds(w):
    w = np.array(w)
    if w.sum() <= 0:
        return
    p = w / w.sum()
    h = shannon_entropy(p)
    assert -1e-15 <= h <= math.log2(len(p)) + 1e-12


# -- the four identities, on random joint tables -------------------------------


def _random_tables(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        shape = tuple(rng.integers(2, 5, size=2))
        conc = rng.choice([0.1, 1.0, 10.0])
        yield rng.dirichlet(np.full(np.prod(shape), conc)).reshape(shape)


def test_entropy_axioms_on_random_tables():
    for t in _random_tables(2000, 11):
        hxy = joint_entropy(t)
        hx, hy = shannon_entropy(marginal(t, 0)), shannon_entropy(marginal(t, 1))
        hx_given_y = conditional_entropy(t, given=1)
        # chain rule
        assert hxy == pytest.approx(hy + hx_given_y, abs=1e-10)
        # subadditivity
        assert hxy <= hx + hy + 1e-12
        # conditioning reduces entropy
        assert hx_given_y <= hx + 1e-12
        # monotonicity
        assert hx <= hxy + 1e-12


def test_conditional_entropy_of_independent_table():
    px, py = np.array([0.3, 0.7]), np.array([0.2, 0.5, 0.3])
    t = np.outer(px, py)
    assert conditional_entropy(t, given=1) == pytest.approx(shannon_entropy(px), abs=1e-14)
    assert conditional_entropy(t, given=0) == pytest.approx(shannon_entropy(py), abs=1e-14)


def test_conditional_entropy_of_deterministic_relation():
    t = np.array([[0.4, 0.0], [0.0, 0.6]])
    assert conditional_entropy(t) == 0
