import numpy as np
import pytest

from curvelab.curves import (
    DisjointUnion,
    HyperellipticCurve,
    PlumbingFamily,
    RationalNodalCurve,
    dualizing_basis,
    evaluate_section,
    expected_dimension,
    section_space,
)
from curvelab.poly import CPoly


def residue(section, pole, radius=1e-4):
    """Contour residue of f(z) dz at a simple pole, by a small circle."""
    theta = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
    z = pole + radius * np.exp(1j * theta)
    vals = section.coeff(z) * radius * 1j * np.exp(1j * theta)
    return np.mean(vals) / 1j


CURVE_G2 = RationalNodalCurve(((0.0, 1.0), (2.0, 3.0)))


def test_dualizing_basis_matches_displayed_form():
    curve = CURVE_G2
    basis = dualizing_basis(curve)
    z = 0.37 + 0.21j
    expected = 1.0 / z - 1.0 / (z - 1.0)
    assert abs(basis.sections[0].coeff(z) - expected) < 1e-12


def test_dualizing_residues_opposite():
    basis = dualizing_basis(CURVE_G2)
    for sec in basis.sections:
        for b, c in CURVE_G2.node_pairs:
            rb = residue(sec, b)
            rc = residue(sec, c)
            assert abs(rb + rc) < 1e-12
    # residues of omega_i at its own pair are +1 and -1
    assert abs(residue(basis.sections[0], 0.0) - 1.0) < 1e-10
    assert abs(residue(basis.sections[0], 1.0) + 1.0) < 1e-10


def test_dualizing_basis_rank():
    basis = dualizing_basis(CURVE_G2)
    assert basis.dim == 2
    M = basis.coefficient_matrix()
    assert np.linalg.matrix_rank(M) == 2


def test_section_space_m1_spans_dualizing_basis():
    curve = CURVE_G2
    a = section_space(curve, 1).coefficient_matrix()
    b = dualizing_basis(curve).coefficient_matrix()
    qa, _ = np.linalg.qr(a.T)
    qb, _ = np.linalg.qr(b.T)
    sv = np.linalg.svd(qa.conj().T @ qb, compute_uv=False)
    assert np.min(sv) > 1.0 - 1e-9  # subspace distance < 1e-9


@pytest.mark.parametrize("g", [2, 3, 4])
@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_nodal_dimensions(g, m):
    rng = np.random.default_rng(100 + g)
    pts = rng.uniform(-2, 2, 2 * g) + 1j * rng.uniform(-2, 2, 2 * g)
    curve = RationalNodalCurve(tuple((pts[2 * i], pts[2 * i + 1]) for i in range(g)))
    basis = section_space(curve, m)
    assert basis.dim == expected_dimension(g, m)


def test_nodal_sections_satisfy_node_matching():
    curve = CURVE_G2
    m = 2
    basis = section_space(curve, m)
    eps = 1e-4
    for sec in basis.sections:
        for b, c in curve.node_pairs:
            lb = eps ** m * sec.coeff(b + eps)
            lc = eps ** m * sec.coeff(c + eps)
            # lim (z-b)^m f = (-1)^m lim (z-c)^m f; evaluating at distance
            # eps leaves an O(eps) relative remainder
            assert abs(lb - (-1.0) ** m * lc) < 2e-3 * (abs(lb) + abs(lc)) + 1e-8


@pytest.mark.parametrize("g,m", [(2, 2), (2, 6), (3, 4), (3, 6)])
def test_hyperelliptic_monomial_count(g, m):
    n_even = m * (g - 1) + 1
    n_odd = max(m * (g - 1) - g, 0)
    assert n_even + n_odd == expected_dimension(g, m)


def test_hyperelliptic_classical_genus2_basis():
    curve = HyperellipticCurve(CPoly([-1.0, 0, 0, 0, 0, 0, 1.0]))  # x^6 - 1
    assert curve.genus == 2
    basis = section_space(curve, 1)
    assert basis.dim == 2
    even0 = basis.sections[0].coeff[0].coefficients
    even1 = basis.sections[1].coeff[0].coefficients
    assert np.allclose(even0, [1.0]) and np.allclose(even1, [0.0, 1.0])


def test_evaluate_section_examples():
    basis = dualizing_basis(CURVE_G2)
    val = evaluate_section(basis.sections[0], -1.0)
    assert abs(val - (-0.5)) < 1e-12  # 1/(-1) - 1/(-2)
    curve = HyperellipticCurve(CPoly([-1.0, 0, 0, 0, 0, 0, 1.0]))
    sec = section_space(curve, 2).sections[1]  # x (dx/y)^2
    assert abs(evaluate_section(sec, 1.0, sheet=1) - 1.0) < 1e-12  # branch point
    zp = 1.3 + 0.2j
    plus = evaluate_section(sec, zp, sheet=1)
    minus = evaluate_section(sec, zp, sheet=-1)
    assert abs(plus - minus) < 1e-12  # even section, sheet independent


def test_sheet_flip_negates_odd_part():
    curve = HyperellipticCurve(CPoly([-1.0, 0, 0, 0, 0, 0, 0, 0, 1.0]))  # x^8-1, g=3
    basis = section_space(curve, 2)
    odd = [s for s in basis.sections if s.coeff[1].degree >= 0 and not s.coeff[1].is_zero()]
    sec = odd[0]
    z = 0.4 + 0.9j
    assert abs(evaluate_section(sec, z, 1) + evaluate_section(sec, z, -1)) < 1e-12


def test_evaluation_at_pole_raises():
    basis = dualizing_basis(CURVE_G2)
    with pytest.raises(ValueError):
        evaluate_section(basis.sections[0], 0.0)


def test_degenerate_configurations_rejected():
    with pytest.raises(ValueError):
        RationalNodalCurve(((0.0, 1e-8), (2.0, 3.0)))
    with pytest.raises(ValueError):
        HyperellipticCurve(CPoly([0.0, 0.0, 1.0]))  # x^2, double root
    with pytest.raises(ValueError):
        PlumbingFamily(CPoly([0.0, 1.0, 1.0]))  # odd degree


def test_plumbing_fiber_even_in_t():
    fam = PlumbingFamily(CPoly([-0.09, 0, 1.0]) * CPoly([-0.16, 0, 1.0]))
    f1 = fam.fiber(0.01)
    f2 = fam.fiber(-0.01)
    assert np.allclose(
        f1.branch_polynomial.coefficients, f2.branch_polynomial.coefficients
    )
    assert f1.genus == fam.genus
    assert fam.limit_normalization().genus == fam.genus - 1


def test_disjoint_union_genus():
    c1 = HyperellipticCurve(CPoly([-1.0, 0, 0, 0, 0, 0, 1.0]))
    c2 = HyperellipticCurve(CPoly([1.0, -2.0, 0.0, 1.0]))  # cubic, g=1
    assert DisjointUnion((c1, c2)).genus == 3
