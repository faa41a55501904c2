"""Complex polynomials, rational functions, truncated power series, and
root finding (simultaneous Aberth iteration with companion-matrix fallback)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CPoly",
    "CRat",
    "RootFindingError",
    "poly_roots",
    "cluster_points",
    "series_mul",
    "series_inv",
    "series_sqrt",
]


class RootFindingError(RuntimeError):
    """Root finder did not converge; carries the best partial root set."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []


def _as_coeff_array(coefficients):
    c = np.atleast_1d(np.asarray(coefficients, dtype=complex))
    if c.ndim != 1:
        raise ValueError("coefficient array must be one-dimensional")
    return c


def _trim_exact(c):
    n = len(c)
    while n > 1 and c[n - 1] == 0:
        n -= 1
    return c[:n]


@dataclass(frozen=True)
class CPoly:
    """Polynomial with complex coefficients, lowest degree first.

    The stored array is trimmed so the leading coefficient is nonzero
    unless the polynomial is identically zero.
    """

    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(1, complex))

    def __post_init__(self):
        c = _trim_exact(_as_coeff_array(self.coefficients))
        object.__setattr__(self, "coefficients", c)
        self.coefficients.setflags(write=False)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def is_zero(self):
        return self.degree == 0 and self.coefficients[0] == 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coefficients[::-1]:
            out = out * z + c
        return out

    def deriv(self, order=1):
        c = self.coefficients
        for _ in range(order):
            if len(c) == 1:
                c = np.zeros(1, complex)
                break
            c = c[1:] * np.arange(1, len(c))
        return CPoly(c)

    def __add__(self, other):
        a, b = self.coefficients, _coeffs(other)
        n = max(len(a), len(b))
        out = np.zeros(n, complex)
        out[: len(a)] += a
        out[: len(b)] += b
        return CPoly(out)

    def __sub__(self, other):
        return self + (-1) * _aspoly(other)

    def __mul__(self, other):
        if np.isscalar(other):
            return CPoly(self.coefficients * other)
        b = _coeffs(other)
        return CPoly(np.convolve(self.coefficients, b))

    __rmul__ = __mul__

    def shifted(self, center):
        """Taylor coefficients around `center`: q with q(s) = p(center + s)."""
        a = self.coefficients.copy()
        n = self.degree
        # repeated synthetic division by (z - center), in place
        for j in range(n):
            for i in range(n - 1, j - 1, -1):
                a[i] = a[i] + center * a[i + 1]
        return CPoly(a)

    def reversed(self, degree=None):
        """Coefficients of u^d * p(1/u) for d = degree (default deg p)."""
        d = self.degree if degree is None else int(degree)
        if d < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        out = np.zeros(d + 1, complex)
        out[d - self.degree:] = self.coefficients[::-1]
        return CPoly(out)

    def monic(self):
        lead = self.coefficients[-1]
        if lead == 0:
            raise ValueError("zero polynomial has no monic form")
        return CPoly(self.coefficients / lead)


def _aspoly(p):
    return p if isinstance(p, CPoly) else CPoly(p)


def _coeffs(p):
    return p.coefficients if isinstance(p, CPoly) else _as_coeff_array(p)


@dataclass(frozen=True)
class CRat:
    """Rational function numerator/denominator; kept in reduced form."""

    numerator: CPoly
    denominator: CPoly

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ValueError("rational function with zero denominator")

    def __call__(self, z):
        return self.numerator(z) / self.denominator(z)

    def deriv(self):
        n, d = self.numerator, self.denominator
        return CRat(n.deriv() * d - n * d.deriv(), d * d)

    def reduced(self, tol=1e-10):
        """Cancel numerator/denominator roots that coincide within the
        clustering tolerance."""
        if self.numerator.is_zero():
            return CRat(CPoly([0.0]), CPoly([1.0]))
        nr = poly_roots(self.numerator, tol)
        dr = poly_roots(self.denominator, tol)
        radius = _cluster_radius(self.denominator, tol)
        num_roots = []
        den_roots = list(dr)
        for r, mult in nr:
            hit = None
            for j, (s, mult_s) in enumerate(den_roots):
                if abs(r - s) <= radius:
                    hit = j
                    break
            if hit is None:
                num_roots.append((r, mult))
                continue
            s, mult_s = den_roots[hit]
            common = min(mult, mult_s)
            if mult - common:
                num_roots.append((r, mult - common))
            if mult_s - common:
                den_roots[hit] = (s, mult_s - common)
            else:
                del den_roots[hit]
        lead_n = self.numerator.coefficients[-1]
        lead_d = self.denominator.coefficients[-1]
        return CRat(lead_n * _from_roots(num_roots), lead_d * _from_roots(den_roots))


def _from_roots(root_mults):
    p = CPoly([1.0])
    for r, m in root_mults:
        for _ in range(m):
            p = p * CPoly([-r, 1.0])
    return p


# ---------------------------------------------------------------------------
# root finding


def _cluster_radius(p, tol):
    return 1e-8 * (1.0 + np.max(np.abs(p.coefficients))) if tol is None else max(
        1e-8 * (1.0 + np.max(np.abs(p.coefficients))), 10.0 * tol
    )


def backward_error_scale(p, z):
    """Sum_k |c_k| |z|^k, the natural residual scale for |p(z)|."""
    z = np.abs(np.asarray(z, dtype=complex))
    out = np.zeros_like(z, dtype=float)
    for c in np.abs(p.coefficients[::-1]):
        out = out * z + c
    return out

def _aberth(coeffs, maxiter=400, tol=1e-14):
    """Simultaneous Aberth–Ehrlich iteration on a monic coefficient array."""
    deg = len(coeffs) - 1
    dcoeffs = coeffs[1:] * np.arange(1, deg + 1)
    # deterministic initial guesses on a circle scaled by a root bound
    bound = 1.0 + np.max(np.abs(coeffs[:-1] / coeffs[-1])) if deg else 1.0
    k = np.arange(deg)
    z = 0.7 * bound * np.exp(2j * np.pi * (k + 0.35) / deg) + 0.1 * bound * 1j ** (k % 4)
    for _ in range(maxiter):
        pz = np.zeros_like(z)
        for c in coeffs[::-1]:
            pz = pz * z + c
        dpz = np.zeros_like(z)
        for c in dcoeffs[::-1]:
            dpz = dpz * z + c
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dpz != 0, pz / np.where(dpz != 0, dpz, 1), 0.02 * bound)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            rep = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - newton * rep
            step = np.where(np.abs(denom) > 1e-300, newton / np.where(denom != 0, denom, 1), newton)
        z = z - step
        if np.max(np.abs(step)) < tol * (1.0 + np.max(np.abs(z))):
            return z, True
    return z, False


def _companion_roots(coeffs):
    deg = len(coeffs) - 1
    mon = coeffs / coeffs[-1]
    comp = np.zeros((deg, deg), complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -mon[:-1]
    return np.linalg.eigvals(comp)


def cluster_points(points, radius):
    """Greedy clustering of a point multiset; returns (center, count) pairs
    in deterministic (Re, Im) order."""
    pts = sorted(points, key=lambda w: (w.real, w.imag))
    clusters = []
    for w in pts:
        for j, (c, k) in enumerate(clusters):
            if abs(w - c) <= radius:
                clusters[j] = ((c * k + w) / (k + 1), k + 1)
                break
        else:
            clusters.append((w, 1))
    return clusters


def _graduated_clusters(p, points, base_radius, coefficient_noise=1e-14, cap=2e-3):
    """Cluster computed roots using Newton inclusion radii and the
    coefficient noise level.

    Two effects scatter a multiplicity-m root into m nearby simple ones:
    iteration error (detected by the a posteriori inclusion radius
    deg * |p/p'|) and relative coefficient noise eta, which splits the
    root at scale eta^(1/m).  The candidate multiplicity of each root is
    its neighbour count within the cap radius, and roots merge when their
    distance is below the corresponding noise scale or their inclusion
    disks overlap.  Wrong merges are caught downstream by the exact
    factorization audits."""
    pts = sorted(points, key=lambda w: (w.real, w.imag))
    n = len(pts)
    if n == 0:
        return []
    z = np.array(pts)
    dp = p.deriv()
    with np.errstate(divide="ignore", invalid="ignore"):
        pz = np.abs(p(z))
        dpz = np.abs(dp(z))
        nu = np.where(dpz > 0, p.degree * pz / np.where(dpz > 0, dpz, 1.0), np.inf)
    nu = np.minimum(nu, cap)
    dist = np.abs(z[:, None] - z[None, :])
    counts = np.sum(dist <= cap, axis=1)  # includes the point itself
    eta = max(float(coefficient_noise), 1e-15)

    def noise_scale(m):
        return min(3.0 * eta ** (1.0 / max(m, 1)), cap) if m >= 2 else 0.0

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            m_hat = max(counts[i], counts[j])
            thresh = max(base_radius, 1.5 * (nu[i] + nu[j]), noise_scale(m_hat))
            if dist[i, j] <= min(thresh, cap):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(z[i])
    clusters = [(sum(g) / len(g), len(g)) for g in groups.values()]
    clusters.sort(key=lambda ck: (ck[0].real, ck[0].imag))
    return clusters


def _refine_cluster(p, center, mult, steps=12):
    """Newton refinement of a multiplicity-`mult` root via p^(mult-1)."""
    q = p.deriv(mult - 1)
    dq = q.deriv()
    z = center
    for _ in range(steps):
        qz = complex(q(z))
        dqz = complex(dq(z))
        if dqz == 0:
            break
        step = qz / dqz
        z = z - step
        if abs(step) < 1e-15 * (1.0 + abs(z)):
            break
    return z


def poly_roots(p, tol=1e-10, cluster_radius=None, coefficient_noise=1e-14):
    """All roots of p with multiplicities, as a list of (root, multiplicity).

    Roots closer than the clustering radius (or the scatter scale implied
    by the stated relative coefficient noise) are merged with summed
    multiplicity, and merged locations are polished by Newton iteration on
    the appropriate derivative.  Raises on the zero polynomial; raises
    RootFindingError with partial results if neither the Aberth iteration
    nor the companion-matrix fallback produces residuals within tolerance.
    """
    p = _aspoly(p)
    if p.is_zero():
        raise ValueError("cannot compute roots of the zero polynomial")
    if p.degree == 0:
        return []
    coeffs = p.coefficients
    # deflate exact zero roots at the origin
    nz = 0
    while coeffs[nz] == 0:
        nz += 1
    work = coeffs[nz:] / coeffs[-1]
    radius = cluster_radius if cluster_radius is not None else _cluster_radius(p, tol)
    if len(work) == 1:
        roots = np.zeros(0, complex)
    else:
        roots, ok = _aberth(work)
        if not ok or not _roots_acceptable(CPoly(work), roots, tol):
            roots = _companion_roots(work)
            if not _roots_acceptable(CPoly(work), roots, max(tol, 1e-8)):
                partial = cluster_points(list(roots), radius)
                raise RootFindingError(
                    "root iteration failed to reach the requested residual tolerance",
                    partial=partial,
                )
    all_roots = list(roots)
    clusters = _graduated_clusters(CPoly(work), all_roots, radius, coefficient_noise)
    out = []
    for center, mult in clusters:
        refined = _refine_cluster(p, center, mult) if mult > 1 else center
        if abs(refined - center) > 4 * radius * mult:
            refined = center
        out.append((refined, mult))
    if nz:
        out.append((0.0 + 0.0j, nz))
    out.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    assert sum(m for _, m in out) == p.degree
    return out


def _roots_acceptable(p, roots, tol):
    if len(roots) == 0:
        return True
    res = np.abs(p(roots))
    scale = backward_error_scale(p, roots)
    return bool(np.all(res <= np.maximum(tol * scale, 1e-13 * scale + 1e-300)))


# ---------------------------------------------------------------------------
# truncated power series (plain coefficient arrays, lowest order first)


def series_mul(a, b, length):
    a = np.asarray(a, dtype=complex)[:length]
    b = np.asarray(b, dtype=complex)[:length]
    return np.convolve(a, b)[:length]


def series_inv(a, length):
    """Reciprocal series of a with a[0] != 0."""
    a = np.asarray(a, dtype=complex)
    if a[0] == 0:
        raise ValueError("series has zero constant term, not invertible")
    out = np.zeros(length, complex)
    out[0] = 1.0 / a[0]
    for k in range(1, length):
        acc = 0.0 + 0.0j
        top = min(k, len(a) - 1)
        for j in range(1, top + 1):
            acc += a[j] * out[k - j]
        out[k] = -acc / a[0]
    return out


def series_sqrt(a, length, branch=None):
    """Square-root series of a with a[0] != 0.  `branch` selects the
    constant term; defaults to the principal square root of a[0]."""
    a = np.asarray(a, dtype=complex)
    if a[0] == 0:
        raise ValueError("series has vanishing constant term, no regular sqrt")
    w0 = np.sqrt(a[0]) if branch is None else branch
    if abs(w0 * w0 - a[0]) > 1e-9 * abs(a[0]):
        raise ValueError("branch value is not a square root of the constant term")
    out = np.zeros(length, complex)
    out[0] = w0
    for k in range(1, length):
        acc = a[k] if k < len(a) else 0.0
        for j in range(1, k):
            acc -= out[j] * out[k - j]
        out[k] = acc / (2.0 * w0)
    return out
