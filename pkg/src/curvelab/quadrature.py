"""Adaptive Gauss-Legendre quadrature over paths in the complex plane and
tensor polar quadrature over disks and annuli (with smoothly excluded disks).

Paths with inverse-square-root endpoint singularities are handled by the
declared substitutions x = endpoint + s^2 (single endpoint) or
x = midpoint + halfspan * sin(theta) (both endpoints / cut loops), which
remove the singularity exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Path",
    "QuadratureError",
    "path_integral",
    "area_disk",
    "area_annulus",
    "area_integral",
    "Region",
    "smooth_step",
]


class QuadratureError(RuntimeError):
    """Adaptive refinement hit its cap; carries best estimate and bound."""

    def __init__(self, message, best=None, error_bound=None):
        super().__init__(f"{message} (best estimate {best}, error bound {error_bound})")
        self.best = best
        self.error_bound = error_bound


@lru_cache(maxsize=32)
def _gl_nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@dataclass(frozen=True)
class Path:
    """Oriented integration path: straight segment, circular arc, or a
    closed loop around a branch cut.

    kind "segment": from `start` to `end`; sqrt_start / sqrt_end declare
    inverse-square-root integrand singularities at the endpoints.
    kind "arc": center/radius with angles theta0 -> theta1.
    kind "cut_loop": closed contour tightly encircling the segment
    [start, end]; the integral equals twice the segment integral of the
    boundary value of f taken on the cut (caller fixes that branch).
    orientation -1 reverses the path.
    """

    kind: str
    start: complex = 0.0
    end: complex = 0.0
    center: complex = 0.0
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0
    orientation: int = 1
    sqrt_start: bool = False
    sqrt_end: bool = False

    def __post_init__(self):
        if self.kind not in ("segment", "arc", "cut_loop"):
            raise ValueError(f"unknown path kind {self.kind!r}")
        if self.kind in ("segment", "cut_loop") and self.start == self.end:
            raise ValueError("zero-length path")
        if self.kind == "arc":
            if self.radius <= 0:
                raise ValueError("arc with nonpositive radius")
            if self.theta0 == self.theta1:
                raise ValueError("zero-length arc")
        if self.orientation not in (-1, 1):
            raise ValueError("orientation must be +1 or -1")

    @staticmethod
    def segment(start, end, sqrt_start=False, sqrt_end=False, orientation=1):
        return Path("segment", start=complex(start), end=complex(end),
                    sqrt_start=sqrt_start, sqrt_end=sqrt_end, orientation=orientation)

    @staticmethod
    def arc(center, radius, theta0, theta1, orientation=1):
        return Path("arc", center=complex(center), radius=float(radius),
                    theta0=float(theta0), theta1=float(theta1), orientation=orientation)

    @staticmethod
    def circle(center, radius, orientation=1):
        return Path.arc(center, radius, 0.0, 2.0 * np.pi, orientation=orientation)

    @staticmethod
    def cut_loop(start, end, orientation=1):
        return Path("cut_loop", start=complex(start), end=complex(end),
                    orientation=orientation)

    def reversed(self):
        return Path(self.kind, start=self.start, end=self.end, center=self.center,
                    radius=self.radius, theta0=self.theta0, theta1=self.theta1,
                    orientation=-self.orientation, sqrt_start=self.sqrt_start,
                    sqrt_end=self.sqrt_end)


def _adaptive_1d(F, a, b, tol, max_depth=60, order=16):
    """Adaptive Gauss-Legendre integration of a vectorized integrand F over
    the real parameter interval [a, b], absolute tolerance tol.

    Panels are accepted on a proportional budget with an absolute floor of
    tol/2048, which keeps deep panels near integrable singularities from
    recursing past machine precision."""
    x1, w1 = _gl_nodes(order)
    x2, w2 = _gl_nodes(2 * order)
    total_len = float(b - a)
    floor = tol / 2048.0
    stack = [(float(a), float(b), 0)]
    total = 0.0 + 0.0j
    err_total = 0.0
    failed = False
    while stack:
        lo, hi, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        v1 = np.sum(F(mid + half * x1) * w1) * half
        v2 = np.sum(F(mid + half * x2) * w2) * half
        err = abs(v2 - v1)
        budget = max(0.5 * tol * (hi - lo) / total_len, floor)
        if err <= budget or err <= 1e-16 * (1.0 + abs(v2)):
            total += v2
            err_total += err
        elif depth >= max_depth:
            total += v2
            err_total += err
            failed = True
        else:
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    if failed or err_total > tol * 4:
        raise QuadratureError("adaptive quadrature did not reach tolerance",
                              best=total, error_bound=err_total)
    return total


def path_integral(f, path, tol=1e-10):
    """Integral of f along the path, adaptive with estimated error <= tol.

    f must accept numpy arrays of complex points and be analytic on a
    neighborhood of the path (declared endpoint singularities excepted).
    """
    sign = path.orientation
    if path.kind == "arc":
        c, r = path.center, path.radius

        def F(theta):
            z = c + r * np.exp(1j * theta)
            return f(z) * 1j * r * np.exp(1j * theta)

        return sign * _adaptive_1d(F, path.theta0, path.theta1, tol)

    if path.kind == "cut_loop":
        return 2.0 * sign * _segment_both_sqrt(f, path.start, path.end, tol)

    a, b = path.start, path.end
    if path.sqrt_start and path.sqrt_end:
        return sign * _segment_both_sqrt(f, a, b, tol)
    if path.sqrt_start or path.sqrt_end:
        if path.sqrt_end:
            a, b = b, a
            sign = -sign
        w = np.sqrt(complex(b - a))

        def F(s):
            z = a + (s * w) ** 2
            return f(z) * 2.0 * (s * w) * w

        return sign * _adaptive_1d(F, 0.0, 1.0, tol)

    d = b - a

    def F(t):
        return f(a + t * d) * d

    return sign * _adaptive_1d(F, 0.0, 1.0, tol)


def _segment_both_sqrt(f, a, b, tol):
    m = 0.5 * (a + b)
    h = 0.5 * (b - a)

    def F(theta):
        s = np.sin(theta)
        return f(m + h * s) * h * np.cos(theta)

    return _adaptive_1d(F, -0.5 * np.pi, 0.5 * np.pi, tol)


# ---------------------------------------------------------------------------
# area quadrature (tensor polar with adaptive radius panels)


def _theta_integral(f, center, radii, tol, max_doublings=14, n0=32):
    """For each radius r in `radii`, the trapezoid value of
    int_0^{2pi} f(center + r e^{i theta}) d theta, refined by doubling."""
    radii = np.asarray(radii, dtype=float)
    n = n0
    theta = np.arange(n) * (2.0 * np.pi / n)
    vals = f(center + radii[:, None] * np.exp(1j * theta)[None, :])
    acc = np.mean(vals, axis=1)
    for _ in range(max_doublings):
        theta_new = theta + np.pi / n
        vals_new = f(center + radii[:, None] * np.exp(1j * theta_new)[None, :])
        acc_new = 0.5 * (acc + np.mean(vals_new, axis=1))
        done = np.all(np.abs(acc_new - acc) <= tol + 1e-14 * np.abs(acc_new))
        n *= 2
        theta = np.sort(np.concatenate([theta, theta_new]))
        # values are recomputed on refinement; acc_new is the full-trapezoid value
        acc = acc_new
        if done:
            return 2.0 * np.pi * acc
        vals = None
    raise QuadratureError("angular refinement cap reached",
                          best=2.0 * np.pi * acc, error_bound=np.nan)


def _radial_integral(f, center, r_lo, r_hi, tol):
    """2-D integral over the annulus r_lo < |x - center| < r_hi."""
    span = r_hi - r_lo

    def G(radii):
        radii = np.atleast_1d(radii)
        theta_tol = 0.1 * tol / (2.0 * np.pi * max(span, 1e-300) * np.maximum(radii, 1e-300).max())
        ring = _theta_integral(f, center, radii, theta_tol)
        return ring * radii

    return _adaptive_1d(G, r_lo, r_hi, 0.9 * tol)


def area_disk(f, center, radius, tol=1e-10, sqrt_center=False):
    """Integral of f over the disk |x - center| <= radius with respect to
    Lebesgue area.  With sqrt_center=True, f may have an integrable
    C/|x-center| singularity; the substitution x = center + s^2 removes it.
    """
    if radius <= 0:
        raise ValueError("disk radius must be positive")
    if not sqrt_center:
        val = _radial_integral(f, center, 0.0, radius, tol)
    else:
        c = complex(center)

        def fs(s):
            return f(c + s * s) * (np.abs(s) ** 2)

        val = 2.0 * _radial_integral(fs, 0.0, 0.0, np.sqrt(radius), tol / 2.0)
    return _real_if_close(val)


def area_annulus(f, center, r_inner, r_outer, tol=1e-10):
    """Integral of f over the annulus r_inner <= |x - center| <= r_outer."""
    if not (0 <= r_inner < r_outer):
        raise ValueError("annulus radii must satisfy 0 <= r_inner < r_outer")
    return _real_if_close(_radial_integral(f, complex(center), r_inner, r_outer, tol))


def _real_if_close(v):
    return v.real if abs(v.imag) <= 1e-9 * (1.0 + abs(v.real)) else v


# ---------------------------------------------------------------------------
# smooth partition of unity and regions with excluded disks


def smooth_step(t):
    """C-infinity step: identically 0 for t <= 0, identically 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    lo = t <= 0.0
    hi = t >= 1.0
    mid = ~(lo | hi)
    out = np.zeros_like(t)
    out[hi] = 1.0
    tm = t[mid]
    a = np.exp(-1.0 / tm)
    b = np.exp(-1.0 / (1.0 - tm))
    out[mid] = a / (a + b)
    return out


def bump_profile(rho):
    """C-infinity bump of the scaled radius rho: 1 at 0, 0 for rho >= 1."""
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    inside = rho < 1.0
    r2 = rho[inside] ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2))
    return out


@dataclass(frozen=True)
class Region:
    """Disk or annulus with optional excluded disks (center, radius)."""

    center: complex
    r_outer: float
    r_inner: float = 0.0
    exclusions: tuple = ()

    def __post_init__(self):
        if not (0 <= self.r_inner < self.r_outer):
            raise ValueError("region radii must satisfy 0 <= r_inner < r_outer")
        for c, r in self.exclusions:
            if r <= 0:
                raise ValueError("excluded disk with nonpositive radius")


def _exclusion_cushions(region):
    """Choose cushion radii R_i > r_i for every excluded disk so cushions
    stay inside the region and do not overlap each other."""
    cushions = []
    exc = [(complex(c), float(r)) for c, r in region.exclusions]
    for i, (c, r) in enumerate(exc):
        limit = 2.5 * r
        d_center = abs(c - region.center)
        if d_center + r >= region.r_outer or (region.r_inner and d_center - r <= region.r_inner):
            raise ValueError("excluded disk not strictly inside the region")
        limit = min(limit, 0.9 * (region.r_outer - d_center))
        if region.r_inner:
            limit = min(limit, 0.9 * (d_center - region.r_inner))
        for j, (c2, r2) in enumerate(exc):
            if j != i:
                gap = abs(c - c2)
                if gap <= r + r2:
                    raise ValueError("excluded disks overlap")
                limit = min(limit, 0.45 * (gap - r2))
        if limit <= r * (1.0 + 1e-9):
            raise ValueError("no room for a smooth cushion around an excluded disk")
        cushions.append(min(limit, 2.0 * r))
    return cushions


def area_integral(f, region, tol=1e-10):
    """Integral of a density over a Region, excluded disks removed exactly.

    The integrand is never evaluated inside the excluded disks: a smooth
    cutoff equal to 1 on each excluded disk splits the integral into
    cushion annuli around the exclusions plus a globally smooth remainder.
    """
    if not region.exclusions:
        if region.r_inner == 0.0:
            return area_disk(f, region.center, region.r_outer, tol)
        return area_annulus(f, region.center, region.r_inner, region.r_outer, tol)

    cushions = _exclusion_cushions(region)
    exc = [(complex(c), float(r)) for c, r in region.exclusions]

    def chi(x, c, r_in, r_out):
        return 1.0 - smooth_step((np.abs(x - c) - r_in) / (r_out - r_in))

    def masked(x):
        x = np.asarray(x, dtype=complex)
        w = np.ones(x.shape, dtype=float)
        for (c, r), cush in zip(exc, cushions):
            w = w * (1.0 - chi(x, c, 1.001 * r, cush))
        out = np.zeros(x.shape, dtype=complex)
        live = w > 0.0
        if np.any(live):
            out[live] = w[live] * np.asarray(f(x[live]), dtype=complex)
        return out

    total = area_integral(masked, Region(region.center, region.r_outer, region.r_inner), tol / 2.0)
    n = max(len(exc), 1)
    for (c, r), cush in zip(exc, cushions):
        def weighted(x, c=c, r=r, cush=cush):
            return chi(x, c, 1.001 * r, cush) * np.asarray(f(x), dtype=complex)

        total += area_annulus(weighted, c, r, cush, tol / (2.0 * n))
    return _real_if_close(total)
