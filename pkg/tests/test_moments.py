import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conicgames.cones import Moment, in_cone, in_dual_cone, moment_svec_maps, svec
from conicgames.moments import (hankel, hankel_adjoint, localizing, localizing_adjoint, point_moments, ratio_max,
                                ratio_min, uniform_moments)

GRID = np.linspace(-1.0, 1.0, 20001)


def test_hankel_examples():
    a1, a2, a3 = 1.5, -2.0, 4.0
    np.testing.assert_array_equal(hankel([a1, a2, a3]), [[a1, a2], [a2, a3]])
    np.testing.assert_array_equal(hankel_adjoint(np.eye(2)), [1, 0, 1])
    with pytest.raises(ValueError):
        hankel([1.0, 2.0])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_hankel_adjoint_pairing(k, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=2 * k - 1)
    B = rng.normal(size=(k, k))
    B = B + B.T
    assert abs(a @ hankel_adjoint(B) - np.sum(hankel(a) * B)) <= 1e-12 * (1 + np.abs(B).sum() * np.abs(a).max())


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_localizing_adjoint_pairing(k, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=2 * k - 1)
    B = rng.normal(size=(k - 1, k - 1))
    B = B + B.T
    lhs = a @ localizing_adjoint(B, a.size)
    assert lhs == pytest.approx(np.sum(localizing(a) * B), abs=1e-11)


def test_localizing_matches_congruence_form():
    a = np.arange(1.0, 8.0)
    H = hankel(a)
    k = H.shape[0]
    M1 = np.vstack([np.eye(k - 1), np.zeros((1, k - 1))])
    M2 = np.vstack([np.zeros((1, k - 1)), np.eye(k - 1)])
    np.testing.assert_allclose(localizing(a), M1.T @ H @ M1 - M2.T @ H @ M2)


def test_measures_give_psd_moment_matrices():
    for t in (-1.0, -0.3, 0.0, 0.9, 1.0):
        mu = point_moments(t, 7)
        assert np.linalg.eigvalsh(hankel(mu))[0] >= -1e-12
        assert np.linalg.eigvalsh(localizing(mu))[0] >= -1e-12
    np.testing.assert_allclose(uniform_moments(5), [1, 0, 1 / 3, 0, 1 / 5])


def test_moment_svec_maps_reproduce_matrices():
    rng = np.random.default_rng(4)
    mu = rng.normal(size=5)
    Hm, Lm = moment_svec_maps(5)
    np.testing.assert_allclose(Hm @ mu, svec(hankel(mu)), atol=1e-14)
    np.testing.assert_allclose(Lm @ mu, svec(localizing(mu)), atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_ratio_min_against_grid(deg, seed):
    rng = np.random.default_rng(seed)
    p = rng.normal(size=deg + 1)
    w = np.array([2.0, rng.uniform(-1, 1), rng.uniform(0, 0.5)])  # positive on [-1, 1]
    val, t = ratio_min(p, w)
    grid = np.polynomial.polynomial.polyval(GRID, p) / np.polynomial.polynomial.polyval(GRID, w)
    assert -1 <= t <= 1
    assert val <= grid.min() + 1e-12 * (1 + abs(val))
    assert val >= grid.min() - 1e-4 * (1 + np.abs(p).sum())


def test_ratio_min_ties_go_left_and_max_mirrors():
    assert ratio_min([0.0, 0.0, 1.0]) == (0.0, 0.0)
    assert ratio_min([1.0, 0.0, -1.0])[1] == -1.0
    assert ratio_max([0.0, 1.0]) == (1.0, 1.0)


def test_nonnegative_polynomials_are_dual():
    """Polynomials nonnegative on [-1, 1] pair nonnegatively with every moment vector."""
    K = [Moment(4)]
    p = np.array([0.0, 0.0, 1.0, 0.0, 0.0])  # t^2
    assert in_dual_cone(K, p)
    for t in np.linspace(-1, 1, 11):
        assert in_cone(K, point_moments(t, 5))
        assert p @ point_moments(t, 5) >= 0
