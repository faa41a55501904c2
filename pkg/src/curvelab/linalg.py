"""Small dense linear algebra helpers: Hermitian Cholesky factorization,
orthonormal nullspaces, and column rank profiles of series coefficient
matrices."""

from __future__ import annotations

import numpy as np

__all__ = [
    "NotPositiveDefiniteError",
    "hermitian_factor",
    "orthonormal_nullspace",
    "rank_profile",
]


class NotPositiveDefiniteError(ValueError):
    def __init__(self, pivot_index, pivot_value):
        super().__init__(
            f"matrix is not positive definite: pivot {pivot_index} "
            f"has value {pivot_value}"
        )
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value


def hermitian_factor(G, tol=1e-10):
    """Lower-triangular C with C @ C.conj().T == G for Hermitian positive
    definite G.  The diagonal of C is real positive.  Raises
    NotPositiveDefiniteError naming the offending pivot otherwise."""
    G = np.asarray(G, dtype=complex)
    n = G.shape[0]
    if G.shape != (n, n):
        raise ValueError("hermitian_factor expects a square matrix")
    scale = np.max(np.abs(G)) or 1.0
    if np.max(np.abs(G - G.conj().T)) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    H = 0.5 * (G + G.conj().T)
    C = np.zeros_like(H)
    for j in range(n):
        s = H[j, j].real - np.sum(np.abs(C[j, :j]) ** 2)
        if s <= tol * scale * 1e-6 or s <= 0:
            raise NotPositiveDefiniteError(j, s)
        C[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            C[i, j] = (H[i, j] - np.dot(C[i, :j], C[j, :j].conj())) / C[j, j]
    return C


def orthonormal_nullspace(A, rtol=1e-9):
    """Orthonormal basis (rows) of the nullspace of A, via SVD.

    Returns (basis, singular_values).  Fails loudly when the spectral gap
    separating the nullspace is poorly defined."""
    A = np.asarray(A, dtype=complex)
    if A.shape[0] == 0:
        n = A.shape[1]
        return np.eye(n, dtype=complex), np.zeros(0)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if len(s) else 0.0
    null_mask = s <= rtol * max(smax, 1.0)
    rank = int(np.sum(~null_mask))
    if 0 < rank < len(s) and s[rank] > 0 and s[rank - 1] < 1e3 * s[rank]:
        raise ValueError("ill-conditioned constraint system: no clear rank gap")
    basis = vh[rank:, :].conj()
    return basis, s


def rank_profile(C, rtol=1e-8):
    """Column indices at which the rows of C contribute new rank.

    C is an (n, K) matrix whose rows are truncated series coefficients.
    Gaussian elimination proceeds column by column; the returned sorted
    list of n pivot columns is the vanishing-order sequence of the row
    span.  Raises if fewer than n pivots are found."""
    C = np.asarray(C, dtype=complex).copy()
    n, K = C.shape
    norms = np.max(np.abs(C), axis=1)
    if np.any(norms == 0):
        raise ValueError("zero row in rank profile computation")
    C = C / norms[:, None]
    active = list(range(n))
    pivots = []
    for k in range(K):
        if not active:
            break
        col = np.array([abs(C[i, k]) for i in active])
        live_scale = max(np.max(np.abs(C[active, k:])), 1e-300)
        j = int(np.argmax(col))
        if col[j] <= rtol * live_scale:
            continue
        i_piv = active[j]
        pivots.append(k)
        piv = C[i_piv, k]
        for i in active:
            if i != i_piv:
                C[i, k:] -= (C[i, k] / piv) * C[i_piv, k:]
        active.remove(i_piv)
    if len(pivots) != n:
        raise ValueError(
            f"rank profile incomplete: found {len(pivots)} pivots out of {n}; "
            "extend the series length"
        )
    return pivots
