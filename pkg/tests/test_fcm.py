import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import fcm_fixed_point

from inkcount.clustering import InvalidKError, fcm
from inkcount.clustering.fcm import memberships


def test_equidistant_sample():
    # squared distances to the two centroids are equal
    u = memberships(np.array([[4.0, 4.0]]), m=2.0)
    np.testing.assert_array_equal(u, [[0.5, 0.5]])


def test_coincident_sample():
    u = memberships(np.array([[3.0, 0.0, 1.0], [0.0, 0.0, 2.0]]), m=2.0)
    np.testing.assert_array_equal(u, [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])


def test_membership_formula():
    d2 = np.array([[1.0, 4.0, 9.0]])
    d = np.sqrt(d2[0])
    m = 2.5
    expected = [1 / sum((d[j] / d[l]) ** (2 / (m - 1)) for l in range(3)) for j in range(3)]
    np.testing.assert_allclose(memberships(d2, m)[0], expected, rtol=1e-13)


def test_tiny_distances_stay_finite():
    u = memberships(np.array([[1e-300, 4e-300]]), m=2.0)
    np.testing.assert_allclose(u, [[0.8, 0.2]], rtol=1e-12)


@pytest.mark.parametrize("k, m", [(0, 2.0), (7, 2.0), (2, 1.0), (2, 0.5)])
def test_invalid_parameters(k, m):
    with pytest.raises(ValueError):
        fcm(np.random.default_rng(0).random((6, 2)), k, m=m)


def test_invalid_k_type():
    with pytest.raises(InvalidKError):
        fcm(np.zeros((3, 2)), 4)


FIXTURE = np.array([[0.0, 0.0], [0.4, 0.1], [0.1, 0.5], [4.0, 4.0], [4.3, 3.8], [3.9, 4.4]])


def test_fixed_point_oracle():
    res = fcm(FIXTURE, 2, m=2.0, seed=1, tol=1e-12, max_iter=5000)
    assert res.converged
    u0 = np.random.default_rng(7).random((6, 2))
    u0 /= u0.sum(axis=1, keepdims=True)
    ref = fcm_fixed_point(FIXTURE, u0, m=2)
    # columns may come out in either order
    err = min(np.abs(res.memberships - ref).max(), np.abs(res.memberships[:, ::-1] - ref).max())
    assert err <= 1e-6


@given(st.integers(0, 10_000), st.integers(3, 30), st.integers(1, 4), st.integers(2, 4), st.floats(1.2, 3.0))
def test_contract(seed, n, d, k, m):
    k = min(k, n)
    X = np.random.default_rng(seed).normal(size=(n, d))
    sums = []
    res = fcm(X, k, m=m, seed=seed, max_iter=100, callback=lambda it, u, c: sums.append(u.sum(axis=1)))
    for s in sums:
        np.testing.assert_allclose(s, 1.0, atol=1e-9)
    assert ((res.memberships >= 0) & (res.memberships <= 1)).all()
    assert (np.diff(res.trace) <= 1e-12).all()
    assert len(sums) == res.iterations


def test_deterministic():
    X = np.random.default_rng(2).random((50, 3))
    a, b = fcm(X, 3, seed=4), fcm(X, 3, seed=4)
    np.testing.assert_array_equal(a.memberships, b.memberships)


def test_separated_blobs_hard_labels():
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(c, 0.1, size=(20, 2)) for c in (0.0, 5.0, 10.0)])
    labels = fcm(X, 3, seed=0).labels
    for block in range(3):
        assert len(np.unique(labels[block * 20 : (block + 1) * 20])) == 1
    assert len(np.unique(labels)) == 3
