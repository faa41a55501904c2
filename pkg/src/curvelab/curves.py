"""Concrete curve models and their spaces of pluricanonical sections.

Three models are supported:

* RationalNodalCurve: P^1 with g pairs of points (b_i, c_i) identified,
  arithmetic genus g.  Sections of the m-th dualizing power are rational
  coefficients f(z) against (dz)^m with poles of order <= m at the node
  preimages, a matching condition at each node, and vanishing of order
  >= 2m at infinity.
* HyperellipticCurve y^2 = p(x): sections of K^m are (even(x) + odd(x) y)
  against the everywhere-regular affine frame (dx/y)^m.
* PlumbingFamily y^2 = (x^2 - t^2) q(x): smooth fibers for t != 0 that
  acquire a non-separating node over x = 0 at t = 0; the normalization of
  the limit is y^2 = q(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import orthonormal_nullspace
from .poly import CPoly, CRat, poly_roots

__all__ = [
    "RationalNodalCurve",
    "HyperellipticCurve",
    "PlumbingFamily",
    "DisjointUnion",
    "Section",
    "SectionBasis",
    "dualizing_basis",
    "section_space",
    "evaluate_section",
]

MIN_POINT_SEPARATION = 1e-6


@dataclass(frozen=True)
class RationalNodalCurve:
    """Irreducible rational curve with g nodes, given by the g pairs of
    identified points of its normalization P^1 (affine z-chart, basepoint
    at infinity)."""

    node_pairs: tuple

    def __post_init__(self):
        pairs = tuple((complex(b), complex(c)) for b, c in self.node_pairs)
        object.__setattr__(self, "node_pairs", pairs)
        if len(pairs) < 2:
            raise ValueError("rational nodal curve needs arithmetic genus >= 2")
        pts = [w for bc in pairs for w in bc]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if abs(pts[i] - pts[j]) < MIN_POINT_SEPARATION:
                    raise ValueError(
                        "node points closer than the chart resolution "
                        f"({pts[i]} vs {pts[j]})"
                    )

    @property
    def genus(self):
        return len(self.node_pairs)

    @property
    def points(self):
        return [w for bc in self.node_pairs for w in bc]

    def chart_swapped(self):
        """The same curve written in the chart u = 1/z (requires that no
        node point sits at the origin)."""
        if any(abs(w) < MIN_POINT_SEPARATION for w in self.points):
            raise ValueError("chart swap would move a node point to infinity")
        return RationalNodalCurve(tuple((1.0 / b, 1.0 / c) for b, c in self.node_pairs))


@dataclass(frozen=True)
class HyperellipticCurve:
    """Smooth hyperelliptic model y^2 = p(x) with p squarefree of degree
    2g+1 or 2g+2."""

    branch_polynomial: CPoly

    def __post_init__(self):
        p = self.branch_polynomial
        if not isinstance(p, CPoly):
            p = CPoly(p)
            object.__setattr__(self, "branch_polynomial", p)
        if p.degree < 3:
            raise ValueError("branch polynomial must have degree >= 3 (genus >= 1)")
        roots = poly_roots(p, 1e-12)
        if any(m > 1 for _, m in roots):
            raise ValueError("branch polynomial is not squarefree")
        pts = [r for r, _ in roots]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if abs(pts[i] - pts[j]) < MIN_POINT_SEPARATION:
                    raise ValueError("branch points closer than chart resolution")

    @property
    def genus(self):
        return (self.branch_polynomial.degree - 1) // 2

    @property
    def is_even_model(self):
        """True when deg p = 2g + 2 (two points over x = infinity)."""
        return self.branch_polynomial.degree % 2 == 0

    @cached_property
    def branch_points(self):
        roots = poly_roots(self.branch_polynomial, 1e-12)
        return tuple(sorted((r for r, _ in roots), key=lambda w: (w.real, w.imag)))

    def y_squared(self, x):
        return self.branch_polynomial(x)

    def y_reference(self, x):
        """Deterministic sheet labeling: sheet +1 carries the principal
        square root of p(x) (discontinuous across branch cuts, but fixed)."""
        return np.sqrt(self.branch_polynomial(np.asarray(x, dtype=complex)))


@dataclass(frozen=True)
class PlumbingFamily:
    """Family y^2 = (x - t)(x + t) q(x) with q squarefree of degree 2g,
    q(0) != 0.  Fibers at t and -t coincide (the defining polynomial is
    even in t)."""

    q: CPoly

    def __post_init__(self):
        q = self.q
        if not isinstance(q, CPoly):
            q = CPoly(q)
            object.__setattr__(self, "q", q)
        if q.degree % 2 != 0 or q.degree < 2:
            raise ValueError("q must have even degree 2g with g >= 1")
        if abs(q(0.0)) < MIN_POINT_SEPARATION:
            raise ValueError("q(0) = 0: the node would collide with a branch point")
        roots = poly_roots(q, 1e-12)
        if any(m > 1 for _, m in roots):
            raise ValueError("q is not squarefree")

    @property
    def genus(self):
        """Genus g of the smooth fibers; q has degree 2g, the fibers have
        branch polynomials of degree 2g + 2."""
        return self.q.degree // 2

    def fiber(self, t):
        t = complex(t)
        if t == 0:
            raise ValueError("fiber at t = 0 is nodal; use limit_normalization()")
        qt = CPoly([-t * t, 0.0, 1.0]) * self.q
        return HyperellipticCurve(qt)

    def limit_normalization(self):
        """Normalization of the nodal limit fiber: y^2 = q(x), genus g-1."""
        return HyperellipticCurve(self.q)

    def node_preimages(self):
        """The two points of the normalization glued at the node: x = 0 on
        the two sheets, y = +/- sqrt(q(0)) (principal branch first)."""
        w = np.sqrt(complex(self.q(0.0)))
        return (0.0 + 0.0j, w), (0.0 + 0.0j, -w)


@dataclass(frozen=True)
class DisjointUnion:
    """Disjoint union of smooth hyperelliptic components (the limit object
    of a separating degeneration)."""

    components: tuple

    def __post_init__(self):
        if len(self.components) < 2:
            raise ValueError("disjoint union needs at least two components")

    @property
    def genus(self):
        return sum(c.genus for c in self.components)


# ---------------------------------------------------------------------------
# sections


@dataclass(frozen=True)
class Section:
    """Global section of the m-th power of the dualizing/canonical sheaf.

    For rational nodal curves the coefficient is a CRat f with section
    f(z) (dz)^m.  For hyperelliptic curves the coefficient is the pair
    (even, odd) with section (even(x) + odd(x) y) (dx/y)^m.
    """

    curve: object
    twist: int
    coeff: object

    def __call__(self, z, sheet=1):
        return evaluate_section(self, z, sheet)


@dataclass(frozen=True)
class SectionBasis:
    sections: tuple
    twist: int

    @property
    def dim(self):
        return len(self.sections)

    def coefficient_matrix(self):
        rows = []
        if isinstance(self.sections[0].coeff, CRat):
            deg = max(s.coeff.numerator.degree for s in self.sections)
            for s in self.sections:
                row = np.zeros(deg + 1, complex)
                c = s.coeff.numerator.coefficients
                row[: len(c)] = c
                rows.append(row)
        else:
            de = max(s.coeff[0].degree for s in self.sections)
            do = max(s.coeff[1].degree for s in self.sections)
            for s in self.sections:
                row = np.zeros(de + do + 2, complex)
                ce, co = s.coeff[0].coefficients, s.coeff[1].coefficients
                row[: len(ce)] = ce
                row[de + 1: de + 1 + len(co)] = co
                rows.append(row)
        return np.array(rows)

    def __post_init__(self):
        M = self.coefficient_matrix()
        # equilibrate columns: monomial coefficients span a huge dynamic
        # range at high degree without affecting the rank
        col = np.max(np.abs(M), axis=0)
        M = M[:, col > 0] / col[col > 0]
        M = M / np.max(np.abs(M), axis=1)[:, None]
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= 1e-9 * s[0]:
            raise ValueError("section basis is numerically rank deficient")


def expected_dimension(genus, m):
    return genus if m == 1 else (2 * m - 1) * (genus - 1)


def nodal_denominator(curve, m):
    """Common denominator prod_i (z - b_i)^m (z - c_i)^m."""
    D = CPoly([1.0])
    for b, c in curve.node_pairs:
        for w in (b, c):
            f = CPoly([-w, 1.0])
            for _ in range(m):
                D = D * f
    return D


def _node_condition_rows(curve, m, degree, scale):
    """Linear conditions on scaled numerator coefficients a_k (numerator
    N(z) = sum a_k (z/scale)^k) expressing the node matching
    lim (z-b)^m f = (-1)^m lim (z-c)^m f for f = N / D."""
    rows = []
    pts = curve.points
    for b, c in curve.node_pairs:
        db = np.prod([(b - w) ** m for w in pts if w != b])
        dc = np.prod([(c - w) ** m for w in pts if w != c])
        k = np.arange(degree + 1)
        row = (b / scale) ** k / db - (-1.0) ** m * (c / scale) ** k / dc
        rows.append(row)
    return np.array(rows)


def section_space(curve, m):
    """Basis of H^0 of the m-th dualizing/canonical power.

    Dimension g for m = 1 and (2m-1)(g-1) for m >= 2; raises when the
    computed nullspace does not match (an ill-conditioned configuration).
    """
    if m < 1:
        raise ValueError("twist m must be >= 1")
    if isinstance(curve, RationalNodalCurve):
        return _nodal_section_space(curve, m)
    if isinstance(curve, HyperellipticCurve):
        return _hyperelliptic_section_space(curve, m)
    raise TypeError(f"unsupported curve type {type(curve).__name__}")


def _nodal_section_space(curve, m):
    g = curve.genus
    d_num = 2 * m * g - 2 * m
    scale = max(1.0, max(abs(w) for w in curve.points))
    rows = _node_condition_rows(curve, m, d_num, scale)
    rows = rows / np.linalg.norm(rows, axis=1)[:, None]
    basis, _ = orthonormal_nullspace(rows, rtol=1e-9)
    want = expected_dimension(g, m)
    if basis.shape[0] != want:
        raise ValueError(
            f"nullspace dimension {basis.shape[0]} != expected {want}: "
            "ill-conditioned node configuration"
        )
    D = nodal_denominator(curve, m)
    powers = scale ** (-np.arange(d_num + 1))
    sections = []
    for vec in basis:
        num = CPoly(vec * powers)
        sections.append(Section(curve, m, CRat(num, D)))
    return SectionBasis(tuple(sections), m)


def _hyperelliptic_section_space(curve, m):
    g = curve.genus
    sections = []
    if m == 1:
        for j in range(g):
            sections.append(Section(curve, 1, (_monomial(j), CPoly([0.0]))))
    else:
        for j in range(m * (g - 1) + 1):
            sections.append(Section(curve, m, (_monomial(j), CPoly([0.0]))))
        for j in range(m * (g - 1) - g):
            sections.append(Section(curve, m, (CPoly([0.0]), _monomial(j))))
        want = expected_dimension(g, m)
        assert len(sections) == want, "monomial count mismatch"
    return SectionBasis(tuple(sections), m)


def _monomial(j):
    c = np.zeros(j + 1, complex)
    c[j] = 1.0
    return CPoly(c)


def dualizing_basis(curve):
    """The g residue forms dz/(z - b_i) - dz/(z - c_i) spanning the
    dualizing sheaf of a rational nodal curve, with the same common
    denominator as section_space(curve, 1)."""
    if not isinstance(curve, RationalNodalCurve):
        raise TypeError("dualizing_basis expects a RationalNodalCurve")
    D = nodal_denominator(curve, 1)
    sections = []
    for i, (b, c) in enumerate(curve.node_pairs):
        # (b_i - c_i) prod_{j != i}(z-b_j)(z-c_j) / D = 1/(z-b_i) - 1/(z-c_i)
        num = CPoly([b - c])
        for j, (bj, cj) in enumerate(curve.node_pairs):
            if j != i:
                num = num * CPoly([-bj, 1.0]) * CPoly([-cj, 1.0])
        sections.append(Section(curve, 1, CRat(num, D)))
    return SectionBasis(tuple(sections), 1)


def evaluate_section(section, z, sheet=1):
    """Value of the section coefficient against its chart frame at z.

    Hyperelliptic sections need the sheet tag (+1/-1 relative to the
    principal square root of p) away from branch points."""
    z = complex(z)
    if isinstance(section.coeff, CRat):
        den = section.coeff.denominator(z)
        if abs(den) < 1e-12 * (1.0 + abs(section.coeff.numerator(z))):
            raise ValueError(f"evaluation at a pole of the section ({z})")
        return complex(section.coeff(z))
    even, odd = section.coeff
    y = sheet * section.curve.y_reference(z)
    return complex(even(z) + odd(z) * y)
