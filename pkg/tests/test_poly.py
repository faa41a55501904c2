import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvelab.poly import (
    CPoly,
    CRat,
    poly_roots,
    series_inv,
    series_mul,
    series_sqrt,
)


def roots_dict(pairs, ndigits=6):
    return {(round(r.real, ndigits), round(r.imag, ndigits)): m for r, m in pairs}


def test_quadratic_exact_roots():
    # z^2 + 1
    out = poly_roots(CPoly([1.0, 0.0, 1.0]), tol=1e-12)
    assert roots_dict(out) == {(0.0, 1.0): 1, (0.0, -1.0): 1}


def test_triple_root_clusters():
    # (z-1)^3 = -1 + 3z - 3z^2 + z^3
    out = poly_roots(CPoly([-1.0, 3.0, -3.0, 1.0]), tol=1e-12)
    assert len(out) == 1
    root, mult = out[0]
    assert mult == 3
    assert abs(root - 1.0) < 1e-6


def test_random_degree_12_against_companion_oracle():
    rng = np.random.default_rng(20240817)
    coeffs = rng.uniform(-1, 1, 13) + 1j * rng.uniform(-1, 1, 13)
    p = CPoly(coeffs)
    # independent oracle: companion-matrix eigenvalues computed here
    mon = coeffs / coeffs[-1]
    comp = np.zeros((12, 12), complex)
    comp[1:, :-1] = np.eye(11)
    comp[:, -1] = -mon[:-1]
    oracle = np.sort_complex(np.linalg.eigvals(comp))
    got = np.sort_complex(np.array([r for r, m in poly_roots(p, 1e-12) for _ in range(m)]))
    assert np.max(np.abs(got - oracle)) < 1e-9


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        poly_roots(CPoly([0.0]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=4), st.integers(0, 2**30))
def test_multiplicities_sum_to_degree(mults, seed):
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-2, 2, len(mults)) + 1j * rng.uniform(-2, 2, len(mults))
    p = CPoly([1.0])
    for c, m in zip(centers, mults):
        for _ in range(m):
            p = p * CPoly([-c, 1.0])
    out = poly_roots(p, tol=1e-10)
    assert sum(m for _, m in out) == p.degree


def test_roots_deterministic():
    rng = np.random.default_rng(7)
    coeffs = rng.normal(size=9) + 1j * rng.normal(size=9)
    a = poly_roots(CPoly(coeffs), 1e-11)
    b = poly_roots(CPoly(coeffs), 1e-11)
    assert a == b


def test_shifted_matches_evaluation():
    p = CPoly([2.0, -1.0, 0.5, 1.0])
    q = p.shifted(1.5 + 0.5j)
    s = 0.3 - 0.2j
    assert abs(q(s) - p(1.5 + 0.5j + s)) < 1e-12


def test_reversed_polynomial():
    p = CPoly([1.0, 2.0, 3.0])
    q = p.reversed(4)  # u^4 p(1/u)
    u = 0.7 + 0.1j
    assert abs(q(u) - u**4 * p(1.0 / u)) < 1e-12


def test_crat_reduced_cancels_common_roots():
    num = CPoly([-1.0, 1.0]) * CPoly([-2.0, 1.0])  # (z-1)(z-2)
    den = CPoly([-1.0, 1.0]) * CPoly([3.0, 1.0])  # (z-1)(z+3)
    r = CRat(num, den).reduced()
    z = 0.25 + 0.1j
    expected = (z - 2.0) / (z + 3.0)
    assert abs(r(z) - expected) < 1e-10
    assert r.numerator.degree == 1 and r.denominator.degree == 1


def test_crat_deriv():
    r = CRat(CPoly([0.0, 1.0]), CPoly([1.0, 1.0]))  # z/(1+z)
    z = 0.4 + 0.3j
    exact = 1.0 / (1.0 + z) ** 2
    assert abs(r.deriv()(z) - exact) < 1e-12


def test_series_inverse_and_sqrt():
    rng = np.random.default_rng(3)
    a = rng.normal(size=8) + 1j * rng.normal(size=8)
    a[0] = 1.5 + 0.2j
    inv = series_inv(a, 8)
    assert np.max(np.abs(series_mul(a, inv, 8) - np.eye(1, 8)[0])) < 1e-12
    sq = series_sqrt(a, 8)
    assert np.max(np.abs(series_mul(sq, sq, 8) - a)) < 1e-12
