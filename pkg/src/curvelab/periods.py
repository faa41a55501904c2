"""Homology bases, period matrices, and Bergman measures of hyperelliptic
curves y^2 = p(x).

Cycles are built on the chain of consecutive sorted branch points: the
loop c_k doubles the segment [e_k, e_{k+1}] across the two sheets.  On
each segment the branch of y is fixed in closed form,

    y_k(x) = i h sqrt(1 - xi^2) * sqrt(lc) * prod_j sqrt_cut(x - e_j),

with x = m + h xi, the product over branch points off the segment, and
every square root cut along a ray pointing away from the segment.  The
loop integral is exactly twice the segment integral, and the substitution
xi = sin(theta) makes the integrand analytic: for f(x) dx / y it becomes
f(x(theta)) / (i * ext_k(x(theta))) with ext_k the off-segment product.

Consecutive lifted loops intersect once (up to sign), non-consecutive
ones are disjoint, so the intersection matrix is skew tridiagonal with
unit entries.  The signs depend on the branch conventions above; instead
of a fragile crossing analysis they are fixed by search: A-cycles are the
odd chain loops, each candidate sign vector determines a symplectic
completion by an integer triangular solve, and the Riemann relations
(symmetry of the period matrix, definite imaginary part) certify the
correct candidate.  A wrong sign vector cannot pass the certificate, and
the search space is only {+-1}^(2g).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import DisjointUnion, HyperellipticCurve, Section, SectionBasis
from .linalg import hermitian_factor
from .measures import DensityMeasure, SingularPoint, UnionMeasure
from .poly import CPoly
from .quadrature import _adaptive_1d

__all__ = [
    "HomologyError",
    "SymplecticCycles",
    "PeriodData",
    "homology_basis",
    "period_matrix",
    "cycle_period",
    "bergman_measure",
    "reduce_to_fundamental_domain",
]


class HomologyError(RuntimeError):
    pass


def _sqrt_cut(w, theta):
    """Branch of sqrt(w) with the cut along the ray arg(w) = theta."""
    w = np.asarray(w, dtype=complex)
    rot = np.exp(-1j * (theta + np.pi))
    a = np.angle(w * rot)  # in (-pi, pi], discontinuous exactly on the ray
    return np.sqrt(np.abs(w)) * np.exp(0.5j * (a + theta + np.pi))


def _project_to_segment(p, a, b):
    d = b - a
    t = ((p - a) * np.conj(d)).real / abs(d) ** 2
    t = min(max(t, 0.0), 1.0)
    return a + t * d


@dataclass(frozen=True)
class _Segment:
    start: complex
    end: complex
    cut_angles: tuple  # cut direction per off-segment branch point
    others: tuple      # the off-segment branch points
    clearance: float   # min distance of foreign branch points to the segment

    @property
    def midpoint(self):
        return 0.5 * (self.start + self.end)

    @property
    def halfspan(self):
        return 0.5 * (self.end - self.start)

    def external(self, x, lc_sqrt):
        """sqrt(lc) * prod_j sqrt_cut(x - e_j) over off-segment points."""
        x = np.asarray(x, dtype=complex)
        out = np.full(x.shape, lc_sqrt, dtype=complex)
        for e, th in zip(self.others, self.cut_angles):
            out = out * _sqrt_cut(x - e, th)
        return out

    def branch_value(self, x, lc_sqrt):
        """The segment branch y_k at points off the collinear extensions."""
        x = np.asarray(x, dtype=complex)
        m, h = self.midpoint, self.halfspan
        xi = (x - m) / h
        u = 1j * h * np.sqrt(1.0 - xi * xi)
        return u * self.external(x, lc_sqrt)


@dataclass(frozen=True)
class SymplecticCycles:
    """Chain loops over consecutive sorted branch points together with the
    integer combinations forming a symplectic basis (A_i = odd chain
    loops, fixed orientation; B_i integer combinations of even loops)."""

    segments: tuple
    sigmas: tuple          # certified consecutive intersection signs
    a_indices: tuple       # chain index of A_i (0-based)
    b_matrix: np.ndarray   # integer matrix: B_i = sum_k b_matrix[i, k] c_k
    lc_sqrt: complex
    genus: int


def _build_segments(points):
    points = list(points)
    segs = []
    for k in range(len(points) - 1):
        a, b = points[k], points[k + 1]
        others = tuple(e for j, e in enumerate(points) if j not in (k, k + 1))
        angles = []
        clearance = np.inf if others else 1.0
        for e in others:
            proj = _project_to_segment(e, a, b)
            d = e - proj
            clearance = min(clearance, abs(d))
            if abs(d) < 1e-9 * (1.0 + abs(e)):
                raise HomologyError(
                    f"branch point {e} lies on the chain segment [{a}, {b}]"
                )
            angles.append(float(np.angle(d)))
        segs.append(_Segment(a, b, tuple(angles), others, float(clearance)))
    return segs


def _b_matrix_for(sigmas, g, n_seg):
    """Integer completion B_i = sum_{j >= i} eps_ij c_{2j+1} solving
    <A_m, B_i> = delta_mi for the tridiagonal intersection matrix with
    consecutive signs `sigmas` (0-based: sigmas[k] = c_k . c_{k+1})."""
    B = np.zeros((g, n_seg), dtype=int)
    for i in range(g):
        eps = sigmas[2 * i]
        B[i, 2 * i + 1] = eps
        for m in range(i + 1, g):
            eps = sigmas[2 * m - 1] * sigmas[2 * m] * eps
            B[i, 2 * m + 1] = eps
    return B


def _intersection_matrix(sigmas, n_seg):
    M = np.zeros((n_seg, n_seg), dtype=int)
    for k, s in enumerate(sigmas):
        M[k, k + 1] = s
        M[k + 1, k] = -s
    return M


def _symplectic_audit(a_indices, b_matrix, sigmas, n_seg, g):
    M = _intersection_matrix(sigmas, n_seg)
    S = np.zeros((2 * g, n_seg), dtype=int)
    for i, k in enumerate(a_indices):
        S[i, k] = 1
    S[g:, :] = b_matrix
    J = S @ M @ S.T
    want = np.block([[np.zeros((g, g), int), np.eye(g, dtype=int)],
                     [-np.eye(g, dtype=int), np.zeros((g, g), int)]])
    return np.array_equal(J, want)


def _segment_period(seg, f, lc_sqrt, tol):
    """Integral over the chain loop c_k of f(x) dx / y: twice the segment
    integral in the sine-substituted parametrization."""

    def F(theta):
        x = seg.midpoint + seg.halfspan * np.sin(theta)
        return f(x) / (1j * seg.external(x, lc_sqrt))

    return 2.0 * _adaptive_1d(F, -0.5 * np.pi, 0.5 * np.pi, tol)


def _assemble(curve, tol):
    """Chain periods, certified intersection signs, symplectic cycles, and
    the period matrix, in one pass."""
    points = curve.branch_points
    g = curve.genus
    lc = curve.branch_polynomial.coefficients[-1]
    lc_sqrt = np.sqrt(complex(lc))
    segs = _build_segments(points)
    n_seg = len(segs)
    if n_seg < 2 * g:
        raise HomologyError("not enough chain segments for the genus")
    a_idx = tuple(2 * i for i in range(g))

    chain = np.zeros((n_seg, g), complex)
    for k, seg in enumerate(segs):
        for j in range(g):
            chain[k, j] = _segment_period(seg, lambda x, j=j: x**j, lc_sqrt, tol)
    P_A = np.array([chain[k] for k in a_idx])
    if abs(np.linalg.det(P_A)) < 1e-10 * max(np.linalg.norm(P_A), 1e-300) ** g:
        raise HomologyError("singular A-period matrix: bad cycle routing")
    P_A_inv = np.linalg.inv(P_A)

    best = None
    n_signs = n_seg - 1
    for bits in range(1 << n_signs):
        sigmas = tuple(1 if (bits >> k) & 1 == 0 else -1 for k in range(n_signs))
        if any(s == 0 for s in sigmas):
            continue
        B = _b_matrix_for(sigmas, g, n_seg)
        if not _symplectic_audit(a_idx, B, sigmas, n_seg, g):
            continue
        omega = (B @ chain) @ P_A_inv
        scale = max(1.0, float(np.max(np.abs(omega))))
        defect = float(np.max(np.abs(omega - omega.T)))
        if defect > 1e-8 * scale:
            continue
        imw = 0.5 * (omega.imag + omega.imag.T)
        eig = np.linalg.eigvalsh(imw)
        if np.min(eig) > 0:
            best = (sigmas, B, omega)
            break
        if np.max(eig) < 0:
            best = (sigmas, -B, -omega)
            break
    if best is None:
        raise HomologyError(
            "no consecutive-sign assignment satisfies the Riemann relations; "
            "the cycle routing is invalid for this branch configuration"
        )
    sigmas, B, omega = best
    cyc = SymplecticCycles(tuple(segs), sigmas, a_idx, B, lc_sqrt, g)
    return cyc, chain, P_A, B @ chain, omega


def homology_basis(curve):
    """Symplectic cycle system for a smooth hyperelliptic curve; certified
    through the Riemann relations of the associated period matrix."""
    cyc, *_ = _assemble(curve, tol=1e-10)
    return cyc


def cycle_period(curve, cycles, f, kind, index, tol=5e-12):
    """Period of f(x) dx / y over A_index or B_index."""
    if kind == "A":
        seg = cycles.segments[cycles.a_indices[index]]
        return _segment_period(seg, f, cycles.lc_sqrt, tol)
    if kind == "B":
        out = 0.0 + 0.0j
        for k, c in enumerate(cycles.b_matrix[index]):
            if c:
                out += c * _segment_period(cycles.segments[k], f, cycles.lc_sqrt, tol)
        return out
    raise ValueError("cycle kind must be 'A' or 'B'")


@dataclass
class PeriodData:
    """Period matrix and frames of a hyperelliptic curve.

    omega: g x g period matrix (symmetric, positive imaginary part)
    normalized_coeffs: rows are x-polynomials n(x) of the A-normalized
        one-forms n(x) dx / y
    gram: Hermitian L^2 Gram matrix of the normalized basis (= 2 Im omega)
    change_of_basis: H with orthonormal frame omega_i = sum_j H_ij omega'_j
    """

    curve: object
    cycles: SymplecticCycles
    omega: np.ndarray
    normalized_coeffs: np.ndarray
    gram: np.ndarray
    change_of_basis: np.ndarray
    a_period_matrix: np.ndarray
    b_period_matrix: np.ndarray

    @property
    def normalized_basis(self):
        secs = tuple(
            Section(self.curve, 1, (CPoly(row), CPoly([0.0])))
            for row in self.normalized_coeffs
        )
        return SectionBasis(secs, 1)

    @property
    def orthonormal_coeffs(self):
        return self.change_of_basis @ self.normalized_coeffs

    def to_report(self):
        lines = ["period data report", f"genus {len(self.omega)}"]
        for name, M in (("omega", self.omega), ("gram", self.gram),
                        ("change_of_basis", self.change_of_basis)):
            lines.append(f"{name} rows as (re, im) pairs:")
            for row in np.atleast_2d(M):
                lines.append("  " + " ".join(f"({v.real:.17g},{v.imag:.17g})"
                                             for v in row))
        return "\n".join(lines)


def period_matrix(curve, tol=5e-12):
    """PeriodData for a smooth hyperelliptic curve: monomial chain periods,
    certified symplectic combination, omega = P_B P_A^{-1}, Gram matrix
    2 Im(omega) via the Riemann bilinear relations, and the orthonormal
    change of basis from a Cholesky factorization."""
    if not isinstance(curve, HyperellipticCurve):
        raise TypeError("period_matrix expects a smooth hyperelliptic curve")
    cyc, chain, P_A, P_B, omega = _assemble(curve, tol)
    scale = max(1.0, float(np.max(np.abs(omega))))
    sym_defect = float(np.max(np.abs(omega - omega.T)))
    if sym_defect > 1e-9 * scale:
        raise HomologyError(
            f"period matrix asymmetric ({sym_defect:.2e}): cycle pairing is wrong"
        )
    eig = np.linalg.eigvalsh(0.5 * (omega.imag + omega.imag.T))
    if np.min(eig) <= 0:
        raise HomologyError("Im(omega) is not positive definite")
    omega = 0.5 * (omega + omega.T)
    C = np.linalg.inv(P_A).T  # omega'_k = sum_l C[k,l] x^l dx/y
    gram = 2.0 * omega.imag
    gram = 0.5 * (gram + gram.T)
    chol = hermitian_factor(gram.astype(complex), tol=1e-10)
    H = np.linalg.inv(chol)
    return PeriodData(curve, cyc, omega, C, gram.astype(complex), H, P_A, P_B)


# ---------------------------------------------------------------------------
# Bergman measure


def bergman_measure(curve, period_data=None, tol=1e-8):
    """Bergman measure: i * sum over an orthonormal basis of holomorphic
    one-forms of omega_i wedge conj(omega_i); total mass equals the genus.

    For a DisjointUnion the result is a UnionMeasure of componentwise
    Bergman measures (components tagged "c0", "c1", ...)."""
    if isinstance(curve, DisjointUnion):
        parts = []
        for i, comp in enumerate(curve.components):
            parts.append((f"c{i}", bergman_measure(comp, tol=tol)))
        return UnionMeasure(tuple(parts))
    pd = period_data if period_data is not None else period_matrix(curve)
    return density_from_form_coeffs(curve, pd.orthonormal_coeffs, tol)


def density_from_form_coeffs(curve, coeffs, tol=1e-8, component="main"):
    """Density measure of i * sum_i n_i(x)/y dx wedge its conjugate: the
    per-sheet Lebesgue density is 2 sum |n_i(x)|^2 / |p(x)| in the x-chart,
    with the u = 1/x chart handled through reversed polynomials."""
    p = curve.branch_polynomial
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    width = coeffs.shape[1]

    def evaluate(x):
        x = np.asarray(x, dtype=complex)
        num = np.zeros(x.shape, dtype=float)
        for row in coeffs:
            val = np.zeros(x.shape, dtype=complex)
            for c in row[::-1]:
                val = val * x + c
            num += np.abs(val) ** 2
        return 2.0 * num / np.abs(p(x))

    even = curve.is_even_model
    deg = p.degree
    g = curve.genus
    rev_p = p.reversed(deg)
    # n(1/u) = u^{-(width-1)} revn(u); the tail density needs the exponent
    # balance against p(1/u) = u^{-deg} revp(u)
    rev_rows = coeffs[:, ::-1]
    # |f_u|^2 = (|revn(u)|^2 / |revp(u)|) |u|^(deg - 2 width - 2); canonical
    # forms (width = g) give exponent 0 (even model) or -1 (odd model)
    extra = deg - 2 * width - 2

    def tail_evaluate(u):
        u = np.asarray(u, dtype=complex)
        num = np.zeros(u.shape, dtype=float)
        for row in rev_rows:
            val = np.zeros(u.shape, dtype=complex)
            for c in row[::-1]:
                val = val * u + c
            num += np.abs(val) ** 2
        base = 2.0 * num / np.abs(rev_p(u))
        if extra:
            base = base * np.abs(u) ** extra
        return base

    if extra < -1:
        raise ValueError("form coefficients decay too slowly at infinity")
    singulars = tuple(SingularPoint(e, "inv_abs") for e in curve.branch_points)
    split = 2.0 * (1.0 + max(abs(e) for e in curve.branch_points))
    return DensityMeasure(
        evaluate=evaluate,
        sheets=2,
        singular_points=singulars,
        tail_evaluate=tail_evaluate,
        tail_singularity="none" if extra == 0 else "inv_abs",
        split_radius=split,
        component=component,
        tol=tol,
    )


def reduce_to_fundamental_domain(tau, max_steps=200):
    """Reduce a point of the upper half plane into the standard fundamental
    domain of the modular group."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    for _ in range(max_steps):
        tau = complex(tau.real - round(tau.real), tau.imag)
        if abs(tau) < 1.0 - 1e-15:
            tau = -1.0 / tau
        else:
            return tau
    return tau
