import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conicgames.cones import (ConeProduct, Moment, Orthant, Psd, canonical_dual_interior, canonical_interior,
                              in_cone, in_dual_cone, in_dual_interior, in_interior, min_eig, smat, svec)
from conicgames.exceptions import DimensionError
from conicgames.moments import point_moments

from oracles import random_cone_point, random_interior, random_product

S2 = np.sqrt(2.0)


def test_svec_examples():
    np.testing.assert_array_equal(svec(np.eye(2)), [1, 0, 1])
    np.testing.assert_allclose(svec([[1, 2], [2, 3]]), [1, 2 * S2, 3])
    assert svec([[1, 2], [2, 3]]) @ svec([[0, 1], [1, 0]]) == pytest.approx(4.0)


def test_svec_order_is_row_wise_upper_triangle():
    M = np.array([[1, 2, 3], [2, 4, 5], [3, 5, 6]], dtype=float)
    np.testing.assert_allclose(svec(M), [1, 2 * S2, 3 * S2, 4, 5 * S2, 6])


def test_smat_examples():
    np.testing.assert_array_equal(smat([1, 0, 1]), np.eye(2))
    np.testing.assert_allclose(smat([1, 2 * S2, 3]), [[1, 2], [2, 3]])


@pytest.mark.parametrize("bad", [np.ones((2, 3)), np.array([[0, 1], [2, 0]])])
def test_svec_rejects(bad):
    with pytest.raises(ValueError):
        svec(bad)


def test_smat_rejects_non_triangular():
    with pytest.raises(DimensionError):
        smat(np.ones(4))


def test_smat_round_trip_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m = int(rng.integers(1, 7))
        R = rng.normal(size=(m, m))
        R = R + R.T
        assert np.max(np.abs(smat(svec(R)) - R)) <= 1e-14


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda m: st.tuples(
    arrays(np.float64, (m, m), elements=st.floats(-100, 100)),
    arrays(np.float64, (m, m), elements=st.floats(-100, 100)))))
def test_svec_isometry(mats):
    M, N = (a + a.T for a in mats)
    tr = np.trace(M @ N)
    assert abs(svec(M) @ svec(N) - tr) <= 1e-12 * (1 + abs(tr)) * max(1.0, np.abs(M).max() * np.abs(N).max())


def test_min_eig_examples():
    assert min_eig(Orthant(3), np.array([2, 0.5, 7])) == 0.5
    assert min_eig(Psd(2), svec(np.diag([2.0, -1.0]))) == pytest.approx(-1.0)
    assert min_eig(Psd(2), svec([[1, 2], [2, 3]])) == pytest.approx(2 - np.sqrt(5))
    with pytest.raises(DimensionError):
        min_eig(Psd(2), np.ones(2))


def test_membership_examples():
    K = ConeProduct([Orthant(2)])
    assert in_cone(K, np.array([0.0, 1.0]), 1e-9)
    assert not in_interior(K, np.array([0.0, 1.0]), 1e-9)
    assert in_interior([Psd(2)], svec(np.eye(2)), 1e-9)
    Y = svec(np.diag([1.0, 0.0, 0.0]))
    assert in_cone([Psd(3)], Y, 1e-9) and not in_interior([Psd(3)], Y, 1e-9)
    with pytest.raises(DimensionError):
        in_cone(K, np.ones(3))


def test_canonical_interior_examples():
    np.testing.assert_array_equal(canonical_interior([Orthant(2)]), [1, 1])
    np.testing.assert_array_equal(canonical_interior([Psd(3)]), svec(np.eye(3)))
    np.testing.assert_array_equal(canonical_interior([Orthant(1), Psd(2)]), [1, 1, 0, 1])
    K = ConeProduct([Orthant(2), Psd(3), Moment(4)])
    assert in_interior(K, canonical_interior(K), 1e-9)
    assert in_dual_interior(K, canonical_dual_interior(K), 1e-9)


def test_block_validation():
    with pytest.raises(ValueError):
        Orthant(0)
    with pytest.raises(ValueError):
        Moment(3)
    with pytest.raises(ValueError):
        ConeProduct([])
    assert Psd(3).dim == 6 and ConeProduct([Orthant(2), Psd(3)]).total_dim == 8


def test_self_duality_proxy():
    """Interior points pair strictly positively with nonzero cone points."""
    rng = np.random.default_rng(1)
    for _ in range(100):
        K = random_product(rng)
        a = random_interior(rng, K)
        assert in_interior(K, a, 1e-9)
        x = random_cone_point(rng, K, rank_drop=False)
        if np.linalg.norm(x) > 1e-8:
            assert a @ x > 0


def test_pointedness():
    rng = np.random.default_rng(2)
    for _ in range(50):
        K = random_product(rng)
        v = random_cone_point(rng, K)
        if np.any(v != 0):
            assert not (in_cone(K, v, 0.0) and in_cone(K, -v, 0.0))
        assert in_cone(K, np.zeros(K.total_dim), 0.0) and in_cone(K, -np.zeros(K.total_dim), 0.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_interior_implies_cone(seed):
    rng = np.random.default_rng(seed)
    K = random_product(rng)
    v = rng.normal(size=K.total_dim)
    if in_interior(K, v, 1e-9):
        assert in_cone(K, v, 1e-9)


def test_moment_cone_membership_and_duality():
    K = ConeProduct([Moment(4)])
    mu = point_moments(0.3, 5)
    assert in_cone(K, mu) and not in_interior(K, mu)
    assert not in_cone(K, point_moments(1.5, 5))  # support outside [-1, 1]
    p = np.array([1.0, 0.0, -1.0, 0.0, 0.0])  # 1 - t^2 >= 0 on [-1, 1], zero at the ends
    assert in_dual_cone(K, p) and not in_dual_interior(K, p)
    assert not in_dual_cone(K, np.array([-0.1, 0, 1.0, 0, 0]))
    rng = np.random.default_rng(3)
    for t in rng.uniform(-1, 1, 20):
        assert point_moments(t, 5) @ p >= -1e-12
