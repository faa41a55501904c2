import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvelab.linalg import (
    NotPositiveDefiniteError,
    hermitian_factor,
    orthonormal_nullspace,
    rank_profile,
)


def test_identity():
    C = hermitian_factor(np.eye(2))
    assert np.allclose(C, np.eye(2))


def test_diagonal():
    C = hermitian_factor(np.diag([4.0, 9.0]))
    assert np.allclose(C, np.diag([2.0, 3.0]))


def test_random_reconstruction():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    G = A @ A.conj().T
    C = hermitian_factor(G, tol=1e-10)
    assert np.linalg.norm(C @ C.conj().T - G) <= 1e-10 * np.linalg.norm(G)


def test_not_positive_definite_names_pivot():
    G = np.diag([1.0, -2.0, 3.0])
    with pytest.raises(NotPositiveDefiniteError) as err:
        hermitian_factor(G)
    assert err.value.pivot_index == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**30), st.integers(2, 6))
def test_factor_lower_triangular_positive_diagonal(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    G = A @ A.conj().T + 0.1 * np.eye(n)
    C = hermitian_factor(G)
    assert np.allclose(np.triu(C, 1), 0.0)
    assert np.all(np.diag(C).real > 0)
    assert np.max(np.abs(np.diag(C).imag)) == 0.0


def test_orthonormal_nullspace():
    A = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    basis, _ = orthonormal_nullspace(A)
    assert basis.shape[0] == 2
    assert np.max(np.abs(A @ basis.T)) < 1e-12
    assert np.allclose(basis @ basis.conj().T, np.eye(2))


def test_rank_profile_orders():
    # rows with leading orders 0, 2, 3 plus a dependent combination shifted
    C = np.array(
        [
            [1.0, 2.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 3.0, 1.0, 2.0],
            [0.0, 0.0, 0.0, 5.0, 1.0],
        ],
        dtype=complex,
    )
    assert rank_profile(C) == [0, 2, 3]


def test_rank_profile_detects_hidden_order():
    # second row equals the first plus an order-3 correction: profile {0, 3}
    row0 = np.array([1.0, 1.0, 0.5, 0.25, 0.1], dtype=complex)
    row1 = row0 + np.array([0.0, 0.0, 0.0, 2.0, 1.0])
    assert rank_profile(np.vstack([row0, row1])) == [0, 3]
