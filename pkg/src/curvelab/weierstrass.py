"""Wronskian sections, Weierstrass points with weights, and the normalized
Weierstrass measure.

The Wronskian of a section basis is treated through two complementary
views that are cross-audited against each other:

* local Taylor expansions of the section coefficients at every special
  point (node preimages, branch points, points over infinity); the column
  rank profile of the coefficient matrix is the vanishing-order sequence
  alpha_1 < ... < alpha_n of the basis there, and the Wronskian order at
  the point is sum(alpha) minus n(n-1)/2 plus frame bookkeeping,
* a global determinant evaluated in log-magnitude form on a sampling
  circle, deflated by the structural factors found locally, interpolated
  at its exactly known degree, and fed to the root finder for the
  remaining (smooth-point) Weierstrass points.

Rows of all determinants are divided by (i-1)!, which changes nothing
about zero sets but keeps coefficient growth representable; for a basis
of thirty-odd sections the raw determinant overflows double precision,
hence the mantissa/exponent sampling.

The exact integer identity  total weight = n deg L + n(n-1)(g-1)  is the
primary self-check, backed by an interpolation-residual audit and a
factorization audit at fresh sample points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import (
    HyperellipticCurve,
    RationalNodalCurve,
    SectionBasis,
    section_space,
)
from .linalg import rank_profile
from .measures import Atom, PointMeasure
from .poly import CPoly, poly_roots, series_inv, series_mul, series_sqrt

__all__ = [
    "WronskianSection",
    "WeightedPoints",
    "WeierstrassError",
    "wronskian",
    "weierstrass_points",
    "weierstrass_measure",
    "classical_wronskian_value",
]

SNAP_RADIUS = 1e-6


class WeierstrassError(RuntimeError):
    pass


def classical_wronskian_value(functions, z, h=1e-3):
    """Finite-difference Wronskian det[d^(i-1) f_j / dz^(i-1)] at z.

    Derivatives come from polynomial interpolation on a circular stencil of
    radius h; this is the independent validation oracle for the assembled
    determinants (stable only for small bases)."""
    n = len(functions)
    count = 2 * n + 2
    nodes = z + h * np.exp(2j * np.pi * np.arange(count) / count)
    V = np.vander(nodes - z, N=count, increasing=True)
    rows = np.zeros((n, n), complex)
    for j, f in enumerate(functions):
        vals = np.array([f(w) for w in nodes], dtype=complex)
        taylor = np.linalg.solve(V, vals)
        for i in range(n):
            rows[i, j] = taylor[i] * math.factorial(i)
    return complex(np.linalg.det(rows))


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class WeightedPoints:
    """Weierstrass points with integer weights; atoms distinguish smooth
    chart points, nodes (both preimages recorded), branch points, and
    points over infinity."""

    curve: object
    twist: int
    atoms: tuple
    total_weight: int
    dimension: int
    bundle_degree: int

    def measure(self):
        scaled = tuple(
            Atom(a.locations, a.mass / self.total_weight, a.sheet, a.label,
                 a.component, a.at_infinity)
            for a in self.atoms
        )
        return PointMeasure(scaled)

    def to_csv_rows(self):
        rows = []
        for a in self.atoms:
            if a.at_infinity:
                rows.append(("inf", "inf", a.sheet, a.label, int(a.mass)))
            else:
                loc = a.locations[0]
                rows.append((loc.real, loc.imag, a.sheet, a.label, int(a.mass)))
        return rows


@dataclass(frozen=True)
class WronskianSection:
    """Assembled Wronskian determinant of a section basis, with rows scaled
    by 1/(i-1)!.

    For nodal curves the determinant is the polynomial Wronskian of the
    section numerators; the rational Wronskian of the section coefficients
    is that divided by D(z)^n.  For hyperelliptic curves it is the ring
    determinant built from the derivation y d/dx, evaluated on sheet +1;
    `parity` records the behaviour under the hyperelliptic involution."""

    basis: SectionBasis
    kind: str
    rows: tuple
    parity: int = 0

    @property
    def dimension(self):
        return self.basis.dim

    def det_value(self, z, sheet=1):
        sign, logabs = _logdet_samples(self.rows, np.atleast_1d(np.asarray(z, complex)),
                                       self.kind, self.basis, sheet)
        return sign * np.exp(logabs)

    def row_scale(self):
        out = 1.0
        for i in range(self.dimension):
            out *= math.factorial(i)
        return out


# ---------------------------------------------------------------------------
# determinant rows


def _nodal_rows(basis):
    n = basis.dim
    current = [s.coeff.numerator for s in basis.sections]
    rows = [tuple(current)]
    for i in range(1, n):
        current = [p.deriv() * (1.0 / i) for p in current]
        rows.append(tuple(current))
    return tuple(rows)


def _hyperelliptic_rows(basis):
    """Scaled iterates of the derivation D = y d/dx on the coefficient ring:
    D(A + By) = (B'p + B p'/2) + A' y."""
    curve = basis.sections[0].curve
    p = curve.branch_polynomial
    dp = p.deriv()
    n = basis.dim
    current = [(s.coeff[0], s.coeff[1]) for s in basis.sections]
    rows = [tuple(current)]
    for i in range(1, n):
        nxt = []
        for A, B in current:
            newA = (B.deriv() * p + B * dp * 0.5) * (1.0 / i)
            newB = A.deriv() * (1.0 / i)
            nxt.append((newA, newB))
        current = nxt
        rows.append(tuple(current))
    return tuple(rows)


def _logdet_samples(rows, z, kind, basis, sheet=1):
    n = len(rows)
    M = np.zeros((len(z), n, n), complex)
    if kind == "nodal":
        for i in range(n):
            for j in range(n):
                M[:, i, j] = rows[i][j](z)
    else:
        curve = basis.sections[0].curve
        w = sheet * curve.y_reference(z)
        for i in range(n):
            for j in range(n):
                A, B = rows[i][j]
                M[:, i, j] = A(z) + B(z) * w
    return np.linalg.slogdet(M)


def wronskian(basis, validate=True, rng_seed=20240601):
    """Assemble the Wronskian section of a basis.

    When validate is set and the dimension allows stable finite
    differences, the determinant is checked at 10 random regular points
    against the classical finite-difference Wronskian."""
    curve = basis.sections[0].curve
    if isinstance(curve, RationalNodalCurve):
        ws = WronskianSection(basis, "nodal", _nodal_rows(basis))
    elif isinstance(curve, HyperellipticCurve):
        rows = _hyperelliptic_rows(basis)
        parity = _probe_parity(rows, basis)
        ws = WronskianSection(basis, "hyperelliptic", rows, parity)
    else:
        raise TypeError(f"unsupported curve type {type(curve).__name__}")
    probes = np.array([0.37 + 0.21j, 0.91 - 0.4j, -1.13 + 0.67j])
    _, logabs = _logdet_samples(ws.rows, probes, ws.kind, basis)
    if not np.any(np.isfinite(logabs)):
        raise WeierstrassError("Wronskian determinant vanishes identically: "
                               "the basis is dependent")
    if validate and basis.dim <= 4:
        _validate_against_finite_differences(ws, rng_seed)
    return ws


def _probe_parity(rows, basis):
    for probe in (1.2173 + 0.531j, -0.733 + 0.912j, 0.341 - 1.207j):
        z = np.array([probe])
        sp, lp = _logdet_samples(rows, z, "hyperelliptic", basis, sheet=1)
        sm, lm = _logdet_samples(rows, z, "hyperelliptic", basis, sheet=-1)
        if not (np.isfinite(lp[0]) and np.isfinite(lm[0])):
            continue
        ref = max(lp[0], lm[0])
        vp = sp[0] * np.exp(lp[0] - ref)
        vm = sm[0] * np.exp(lm[0] - ref)
        if abs(vp) < 1e-8:
            continue
        if abs(vp - vm) <= 1e-6 * abs(vp):
            return 0
        if abs(vp + vm) <= 1e-6 * abs(vp):
            return 1
    raise WeierstrassError("Wronskian determinant has no definite parity; "
                           "section basis is inconsistent")


def _validate_against_finite_differences(ws, rng_seed):
    rng = np.random.default_rng(rng_seed)
    basis = ws.basis
    curve = basis.sections[0].curve
    n = basis.dim
    m = basis.twist
    scale = ws.row_scale()
    for _ in range(10):
        z = complex(rng.uniform(0.5, 1.5) + 1j * rng.uniform(0.2, 1.0))
        if ws.kind == "nodal":
            funcs = [s.coeff for s in basis.sections]
            want = classical_wronskian_value(funcs, z)
            D = basis.sections[0].coeff.denominator
            got = complex(ws.det_value(z)[0]) * scale / complex(D(z)) ** n
        else:
            p = curve.branch_polynomial
            y0 = complex(curve.y_reference(z))

            def sheet_y(w):
                # continuous branch near z, anchored at the reference sheet
                return y0 * np.sqrt(p(np.asarray(w, complex)) / p(z))

            funcs = []
            for s in basis.sections:
                def f(w, s=s):
                    y = sheet_y(w)
                    return (s.coeff[0](w) + s.coeff[1](w) * y) / y ** m
                funcs.append(f)
            # the classical Wronskian of the (dx)^m coefficients is the ring
            # determinant divided by y^(nm + n(n-1)/2)
            want = classical_wronskian_value(funcs, z)
            powd = n * m + n * (n - 1) // 2
            got = complex(ws.det_value(z)[0]) * scale / y0 ** powd
        if abs(got - want) > 1e-6 * max(abs(got), abs(want)):
            raise WeierstrassError(
                f"Wronskian validation failed at {z}: assembled {got}, "
                f"finite differences {want}"
            )


# ---------------------------------------------------------------------------
# gap sequences at special points


def _interleave(half_series, K):
    """Series in v rewritten in s with v = s^2 (odd coefficients zero)."""
    out = np.zeros(K, complex)
    top = min(len(half_series), (K + 1) // 2)
    out[0: 2 * top: 2] = np.asarray(half_series, complex)[:top]
    return out


def _gap_from_series(series_rows, K):
    C = np.zeros((len(series_rows), K), complex)
    for i, row in enumerate(series_rows):
        row = np.asarray(row, complex)[:K]
        C[i, : len(row)] = row
    return rank_profile(C, rtol=1e-7)


def _gap_sequence_adaptive(series_builder, n, cap=4096):
    K = 4 * n + 16
    while True:
        try:
            return _gap_from_series(series_builder(K), K)
        except ValueError:
            if K >= cap:
                raise
            K = min(2 * K, cap)


def _scaled_shift(poly, point, scale, K):
    """Coefficients of poly(point + scale * t) up to order K."""
    c = poly.shifted(point).coefficients
    out = np.zeros(K, complex)
    top = min(len(c), K)
    out[:top] = c[:top] * np.power(scale, np.arange(top))
    return out


def _scaled_rev(poly, d, scale, K):
    """Coefficients of u^d poly(1/u) at u = scale * t, zero padded."""
    if d < 0 or poly.is_zero():
        return np.zeros(K, complex)
    c = poly.reversed(d).coefficients
    out = np.zeros(K, complex)
    top = min(len(c), K)
    out[:top] = c[:top] * np.power(scale, np.arange(top))
    return out


def _nodal_local_series(curve, basis, point, K, scale):
    """Coefficients against the node frame at a node preimage:
    A_j = N_j(point + x) / E(x) with E(x) = D(point + x) / x^m built
    exactly as the product over the other node points, in the scaled
    variable x = scale * t so the series stays well conditioned up to the
    radius of convergence."""
    m = basis.twist
    E = np.zeros(K, complex)
    E[0] = 1.0
    for w in curve.points:
        if w == point:
            continue
        f = CPoly([1.0])
        base = CPoly([point - w, scale])
        for _ in range(m):
            f = f * base
        factor = np.zeros(K, complex)
        top = min(f.degree + 1, K)
        factor[:top] = f.coefficients[:top]
        E = series_mul(E, factor, K)
    Einv = series_inv(E, K)
    out = []
    for s in basis.sections:
        shifted = _scaled_shift(s.coeff.numerator, point, scale, K)
        out.append(series_mul(shifted, Einv, K))
    return out


def _nodal_infinity_series(curve, basis, K, scale):
    """Coefficients against (du)^m over the basepoint at infinity,
    proportional to revN_j(u) / revD(u), in u = scale * t."""
    m = basis.twist
    g = curve.genus
    d_num = 2 * m * g - 2 * m
    revD = np.zeros(K, complex)
    revD[0] = 1.0
    for w in curve.points:
        f = CPoly([1.0])
        base = CPoly([1.0, -w * scale])  # 1 - w u at u = scale t
        for _ in range(m):
            f = f * base
        factor = np.zeros(K, complex)
        top = min(f.degree + 1, K)
        factor[:top] = f.coefficients[:top]
        revD = series_mul(revD, factor, K)
    revDinv = series_inv(revD, K)
    out = []
    for s in basis.sections:
        revN = _scaled_rev(s.coeff.numerator, d_num, scale, K)
        out.append(series_mul(revN, revDinv, K))
    return out


def _hyperelliptic_branch_series(curve, basis, e, K, s_scale):
    """Coefficients c_j = E_j + O_j y pulled back to the branch coordinate
    s (x = e + s^2, y = s h(s)), in s = s_scale * t; the frame (dx/y)^m is
    a unit there."""
    p = curve.branch_polynomial
    v_scale = s_scale * s_scale
    pe = p.shifted(e).coefficients
    if abs(pe[0]) > 1e-8 * max(1.0, float(np.max(np.abs(pe)))):
        raise WeierstrassError("branch series requested at a non-branch point")
    half = (K + 3) // 2
    h2 = np.zeros(half, complex)
    top = min(half, len(pe) - 1)
    h2[:top] = pe[1: top + 1] * np.power(v_scale, np.arange(top))
    h_s = _interleave(series_sqrt(h2, half), K)
    ys = np.zeros(K, complex)
    ys[1:] = s_scale * h_s[: K - 1]
    out = []
    for s in basis.sections:
        half_len = (K + 1) // 2
        Eser = _interleave(_scaled_shift(s.coeff[0], e, v_scale, half_len), K)
        Oser = _interleave(_scaled_shift(s.coeff[1], e, v_scale, half_len), K)
        out.append(Eser + series_mul(Oser, ys, K))
    return out


def _hyperelliptic_infinity_series(curve, basis, K, which, u_scale):
    """Coefficient series over x = infinity against a regular local frame.

    Even model ("plus"/"minus" sheet): proportional to
    revE_j(u) +- revO_j(u) w(u) with w = sqrt(rev p), in u = u_scale * t.
    Odd model ("odd", branch point): revE_j(s^2) + s revO_j(s^2) w(s) in
    s = sqrt(u_scale) * t."""
    p = curve.branch_polynomial
    m = basis.twist
    g = curve.genus
    dE = m * (g - 1)
    dO = m * (g - 1) - g - 1

    if which in ("plus", "minus"):
        sgn = 1.0 if which == "plus" else -1.0
        revp = _scaled_rev(p, p.degree, u_scale, K)
        w = series_sqrt(revp, K)
        rows = []
        for s in basis.sections:
            revE = _scaled_rev(s.coeff[0], dE, u_scale, K)
            revO = _scaled_rev(s.coeff[1], dO, u_scale, K)
            rows.append(revE + sgn * series_mul(revO, w, K))
        return rows
    s_scale = np.sqrt(u_scale)
    half = (K + 3) // 2
    revp_v = _scaled_rev(p, p.degree, u_scale, half)
    w_s = _interleave(series_sqrt(revp_v, half), K)
    rows = []
    for s in basis.sections:
        half_len = (K + 1) // 2
        Eser = _interleave(_scaled_rev(s.coeff[0], dE, u_scale, half_len), K)
        Oser = _interleave(_scaled_rev(s.coeff[1], dO, u_scale, half_len), K)
        sO = np.zeros(K, complex)
        sO[1:] = s_scale * Oser[: K - 1]
        rows.append(Eser + series_mul(sO, w_s, K))
    return rows


# ---------------------------------------------------------------------------
# the weight extraction pipeline


def _circle_logvals(specials, count, logfn, boost=1.0, forbidden_radius=1e-3):
    """Sampling circle around the special points with finite log values."""
    center = complex(np.mean(specials)) if len(specials) else 0.0 + 0.0j
    spread = max([abs(s - center) for s in specials], default=1.0)
    radius = (1.25 * spread + 0.75) * boost
    offset = 0.31
    for _ in range(40):
        angles = 2.0 * np.pi * (np.arange(count) + offset) / count
        z = center + radius * np.exp(1j * angles)
        dmin = min((float(np.min(np.abs(z - s))) for s in specials),
                   default=np.inf)
        if dmin > forbidden_radius:
            logvals = logfn(z)
            if np.all(np.isfinite(logvals.real)):
                return center, radius, offset, z, logvals
        radius *= 1.07
    raise WeierstrassError("could not route a sampling circle around the "
                           "special points")


def _deflated_roots(specials, d_q, logfn, label):
    """Roots of the deflated determinant: sample, interpolate at the exact
    degree, root-find; enlarge the sampling circle until every root lies
    inside it (roots outside the circle are exponentially ill-conditioned
    against sample noise)."""
    boost = 1.0
    for _ in range(10):
        center, radius, offset, _, logvals = _circle_logvals(
            specials, d_q + 9, logfn, boost)
        wroots = _interpolate_and_root(logvals, offset, d_q, label)
        if not wroots:
            return []
        wmax = max(abs(r) for r, _ in wroots)
        if wmax <= 1.02:
            return [(center + radius * r, mult) for r, mult in wroots]
        boost *= 1.3 * wmax
    raise WeierstrassError(f"sampling circle for {label} did not stabilize")


def _interpolate_and_root(logvals, offset, d_q, label):
    """Reconstruct the deflated determinant polynomial from log-form samples
    at the offset roots of unity; audit the residual beyond the exactly
    known degree and the leading coefficient, then root-find."""
    M = len(logvals)
    logvals = logvals - np.mean(logvals.real)
    spread = float(np.max(logvals.real) - np.min(logvals.real))
    if spread > 600.0:
        raise WeierstrassError(f"dynamic range overflow in {label} sampling")
    q = np.exp(logvals)
    coeffs = np.fft.fft(q) / M
    coeffs = coeffs * np.exp(-2j * np.pi * offset * np.arange(M) / M)
    mags = np.abs(coeffs)
    top = float(np.max(mags))
    if top == 0.0:
        raise WeierstrassError(f"deflated determinant vanished in {label}")
    tail_max = float(np.max(mags[d_q + 1:])) if mags[d_q + 1:].size else 0.0
    # genuine degree defects put O(1) mass beyond d_q; sample noise sits
    # orders of magnitude below
    if tail_max > 1e-4 * top:
        raise WeierstrassError(
            f"interpolation audit failed for {label}: residual "
            f"{tail_max / top:.2e} beyond the expected degree {d_q}"
        )
    if mags[d_q] < max(3.0 * tail_max, 1e-12 * top):
        raise WeierstrassError(
            f"leading coefficient audit failed for {label}: the deflated "
            f"degree is below the predicted {d_q}"
        )
    if d_q == 0:
        return []
    noise = max(1e-13, tail_max / top)
    return poly_roots(CPoly(coeffs[: d_q + 1]), tol=1e-9, coefficient_noise=noise)


def _snap_roots(roots, specials, snap_radius=SNAP_RADIUS):
    clean = []
    snapped = {}
    for r, mult in roots:
        hit = None
        for i, s in enumerate(specials):
            if abs(r - s) <= snap_radius:
                hit = i
                break
        if hit is None:
            clean.append((r, mult))
        else:
            snapped[hit] = snapped.get(hit, 0) + mult
    return clean, snapped


def _factorization_audit(logfn, factors, label):
    """Compare log-ratios of the determinant against the reconstructed
    factorization prod (z - a)^k at fresh points; the constants cancel."""
    anchors = [a for a, _ in factors]
    center = complex(np.mean(anchors)) if anchors else 0.0 + 0.0j
    spread = max([abs(a - center) for a in anchors], default=1.0)
    base = center + 1.618 * (spread + 1.0) * np.exp(
        2j * np.pi * np.array([0.1086, 0.4371, 0.8022]))
    lhs = logfn(base)

    def rhs_at(z):
        out = np.zeros(len(z), complex)
        for a, k in factors:
            out = out + k * np.log(z - a)
        return out

    rhs = rhs_at(base)
    for i in (1, 2):
        ratio = np.exp((lhs[i] - lhs[0]) - (rhs[i] - rhs[0]))
        # sample noise spreads across all reconstructed roots; structural
        # defects (missed roots, wrong multiplicities) show up at O(1)
        if abs(ratio - 1.0) > 1e-3:
            raise WeierstrassError(
                f"factorization audit failed for {label}: ratio defect "
                f"{abs(ratio - 1.0):.2e}"
            )


def weierstrass_points(curve, m, basis=None, validate=True):
    """Weierstrass points of the m-th dualizing/canonical power, with
    integer weights summing exactly to n deg L + n(n-1)(g-1)."""
    if isinstance(curve, RationalNodalCurve):
        if m < 2:
            raise ValueError("nodal Weierstrass points need m >= 2 so the "
                             "section space outgrows the arithmetic genus")
        basis = basis if basis is not None else section_space(curve, m)
        return _nodal_weierstrass(curve, m, basis, validate)
    if isinstance(curve, HyperellipticCurve):
        if m < 1:
            raise ValueError("twist must be >= 1")
        basis = basis if basis is not None else section_space(curve, m)
        return _hyperelliptic_weierstrass(curve, m, basis, validate)
    raise TypeError(f"unsupported curve type {type(curve).__name__}")


def _nodal_weierstrass(curve, m, basis, validate):
    g = curve.genus
    n = basis.dim
    N = n * (n - 1) // 2
    deg_L = m * (2 * g - 2)
    target = n * deg_L + n * (n - 1) * (g - 1)
    ws = wronskian(basis, validate=validate)

    pts = list(curve.points)
    branch_sums = {}
    orders = {}
    for point in pts:
        r_pt = 0.9 * min(abs(point - w) for w in pts if w != point)
        alphas = _gap_sequence_adaptive(
            lambda K, s=point, r=r_pt: _nodal_local_series(curve, basis, s, K, r), n
        )
        branch_sums[point] = sum(alphas)
        orders[point] = sum(alphas) - N

    u_scale = 0.9 / max(abs(w) for w in pts)
    inf_alphas = _gap_sequence_adaptive(
        lambda K: _nodal_infinity_series(curve, basis, K, u_scale), n
    )
    ord_inf = sum(inf_alphas) - N
    if ord_inf < 0:
        raise WeierstrassError("negative vanishing order over infinity: "
                               "section regularity bookkeeping is broken")
    deg_P = 2 * m * n * g - 2 * n * m - n * (n - 1) - ord_inf
    d_q = deg_P - sum(orders.values())
    if d_q < 0:
        raise WeierstrassError("negative smooth-point degree: local orders "
                               "are inconsistent")

    def logfn(z):
        sign, logabs = _logdet_samples(ws.rows, z, "nodal", basis)
        vals = np.log(sign) + logabs
        for point, k in orders.items():
            if k:
                vals = vals - k * np.log(z - point)
        return vals

    roots = _deflated_roots(pts, d_q, logfn, "nodal")
    roots, snapped = _snap_roots(roots, pts)
    for idx, extra in snapped.items():
        branch_sums[pts[idx]] += extra

    atoms = []
    for i, (b, c) in enumerate(curve.node_pairs):
        weight = branch_sums[b] + branch_sums[c]
        if weight > 0:
            atoms.append(Atom((b, c), float(weight), 0, f"node:{i}"))
    for r, mult in roots:
        atoms.append(Atom((r,), float(mult), 0, "smooth"))
    if ord_inf > 0:
        atoms.append(Atom((), float(ord_inf), 0, "infinity", at_infinity=True))

    total = int(round(sum(a.mass for a in atoms)))
    if total != target:
        raise WeierstrassError(
            f"total weight audit failed: got {total}, expected {target}"
        )

    def raw_logfn(z):
        sign, logabs = _logdet_samples(ws.rows, z, "nodal", basis)
        return np.log(sign) + logabs

    factors = [(point, orders[point] + snapped.get(pts.index(point), 0))
               for point in pts]
    factors += [(r, mult) for r, mult in roots]
    _factorization_audit(raw_logfn, factors, "nodal Wronskian")
    return WeightedPoints(curve, m, tuple(atoms), total, n, deg_L)


def _hyperelliptic_weierstrass(curve, m, basis, validate):
    g = curve.genus
    n = basis.dim
    N = n * (n - 1) // 2
    deg_L = m * (2 * g - 2)
    target = n * deg_L + n * (n - 1) * (g - 1)
    ws = wronskian(basis, validate=validate)
    parity = ws.parity
    Mfold = n * m + N

    branch = list(curve.branch_points)
    min_sep = min(abs(a - b) for i, a in enumerate(branch) for b in branch[i + 1:])
    weights = {}
    mults = {}
    for e in branch:
        alphas = _gap_sequence_adaptive(
            lambda K, e=e: _hyperelliptic_branch_series(curve, basis, e, K),
            n, np.sqrt(0.5 * min(min_sep, 1.0)),
        )
        w_e = sum(alphas) - N
        if w_e < 0 or (w_e - parity) % 2 != 0:
            raise WeierstrassError(
                f"branch weight {w_e} incompatible with parity {parity} at {e}"
            )
        weights[e] = w_e
        mults[e] = (w_e - parity) // 2

    if curve.is_even_model:
        w_plus = _gap_sequence_adaptive(
            lambda K: _hyperelliptic_infinity_series(curve, basis, K, "plus"),
            n, 0.6)
        w_minus = _gap_sequence_adaptive(
            lambda K: _hyperelliptic_infinity_series(curve, basis, K, "minus"),
            n, 0.6)
        if sum(w_plus) != sum(w_minus):
            raise WeierstrassError("involution-symmetric infinity weights differ")
        w_inf = sum(w_plus) - N
        deg_det = Mfold * (g - 1) - w_inf - parity * (g + 1)
        inf_count = 2
    else:
        alphas = _gap_sequence_adaptive(
            lambda K: _hyperelliptic_infinity_series(curve, basis, K, "odd"),
            n, 0.6)
        w_inf = sum(alphas) - N
        num = Mfold * (2 * g - 2) - w_inf - parity * (2 * g + 1)
        if num % 2 != 0:
            raise WeierstrassError("parity audit failed at infinity")
        deg_det = num // 2
        inf_count = 1
    if w_inf < 0 or deg_det < 0:
        raise WeierstrassError("negative degree bookkeeping at infinity")

    d_q = deg_det - sum(mults.values())
    if d_q < 0:
        raise WeierstrassError("negative smooth-point degree for the "
                               "hyperelliptic Wronskian")

    def logfn(z):
        sign, logabs = _logdet_samples(ws.rows, z, "hyperelliptic", basis)
        vals = np.log(sign) + logabs
        if parity:
            vals = vals - np.log(curve.y_reference(z))
        for e, k in mults.items():
            if k:
                vals = vals - k * np.log(z - e)
        return vals

    roots = _deflated_roots(branch, d_q, logfn, "hyperelliptic")
    roots, snapped = _snap_roots(roots, branch)
    for idx, extra in snapped.items():
        weights[branch[idx]] += 2 * extra

    atoms = []
    for e in branch:
        if weights[e] > 0:
            atoms.append(Atom((e,), float(weights[e]), 0, "branch"))
    for r, mult in roots:
        atoms.append(Atom((r,), float(mult), +1, "smooth"))
        atoms.append(Atom((r,), float(mult), -1, "smooth"))
    if w_inf > 0:
        sheets = (1, -1) if inf_count == 2 else (0,)
        for s in sheets:
            atoms.append(Atom((), float(w_inf), s, "infinity", at_infinity=True))

    total = int(round(sum(a.mass for a in atoms)))
    if total != target:
        raise WeierstrassError(
            f"total weight audit failed: got {total}, expected {target}"
        )

    def raw_logfn(z):
        sign, logabs = _logdet_samples(ws.rows, z, "hyperelliptic", basis)
        vals = np.log(sign) + logabs
        if parity:
            vals = vals - np.log(curve.y_reference(z))
        return vals

    factors = [(e, mults[e] + snapped.get(branch.index(e), 0)) for e in branch]
    factors += [(r, mult) for r, mult in roots]
    _factorization_audit(raw_logfn, factors, "hyperelliptic Wronskian")
    return WeightedPoints(curve, m, tuple(atoms), total, n, deg_L)


def weierstrass_measure(points):
    """Normalized Weierstrass measure: atom weights divided by the total
    weight, so the result has mass exactly one."""
    if points.total_weight <= 0:
        raise ValueError("total weight must be positive")
    return points.measure()
