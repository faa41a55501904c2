"""Measures on curves: weighted atoms, quadrature-backed densities, test
function families, and weak-convergence diagnostics.

Chart conventions: a DensityMeasure lives on a branched double (or single)
cover of the x-plane.  Its evaluator returns the per-sheet density against
Lebesgue measure dA of the chart; the area element of the underlying
2-form i dx ^ dx-bar is included in the evaluator.  Points beyond the
split radius are integrated in the u = 1/x chart through a dedicated tail
evaluator, so no evaluation ever happens at huge |x|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quadrature import _adaptive_1d, _gl_nodes, area_disk, bump_profile, smooth_step

__all__ = [
    "Atom",
    "PointMeasure",
    "DensityMeasure",
    "UnionMeasure",
    "TestFunction",
    "TestFamily",
    "make_test_family",
    "mass_in_disk",
    "integrate",
    "weak_distance",
]

TEST_FAMILY_VERSION = "bumps16+moments-v1"


@dataclass(frozen=True)
class Atom:
    """Weighted atom; `locations` lists every chart coordinate that
    represents the point (two for a node of a nodal curve, one otherwise).
    `at_infinity` atoms have no chart coordinate."""

    locations: tuple
    mass: float
    sheet: int = 0
    label: str = ""
    component: str = "main"
    at_infinity: bool = False


@dataclass(frozen=True)
class PointMeasure:
    atoms: tuple
    component: str = "main"

    def __post_init__(self):
        if any(a.mass <= 0 for a in self.atoms):
            raise ValueError("atom masses must be positive")

    @property
    def total(self):
        return float(sum(a.mass for a in self.atoms))

    def mass_in_disk(self, center, radius):
        center = complex(center)
        out = 0.0
        for a in self.atoms:
            if a.at_infinity:
                continue
            if any(abs(loc - center) <= radius for loc in a.locations):
                out += a.mass
        return out

    def integrate(self, h):
        out = 0.0
        for a in self.atoms:
            if a.at_infinity:
                continue
            vals = [float(np.real(h(loc))) for loc in a.locations]
            out += a.mass * (sum(vals) / len(vals))
        return out

    def to_csv_rows(self):
        rows = []
        for a in self.atoms:
            loc = a.locations[0] if a.locations else complex("nan")
            rows.append((loc.real, loc.imag, a.sheet, a.label, a.mass))
        return rows


@dataclass(frozen=True)
class SingularPoint:
    location: complex
    kind: str  # "inv_abs" (integrable C/|x-s|) or "excluded_pole"


@dataclass
class DensityMeasure:
    """Smooth measure given by per-sheet chart densities.

    evaluate(x):   density against dA in the x-chart (vectorized)
    tail_evaluate(u): density against dA(u) in the u = 1/x chart, covering
                   |x| > split_radius; None when the measure is compactly
                   supported inside the split radius
    """

    evaluate: object
    sheets: int = 2
    singular_points: tuple = ()
    tail_evaluate: object = None
    tail_singularity: str = "none"  # "none" | "inv_abs" | "excluded_pole"
    split_radius: float = 3.0
    component: str = "main"
    tol: float = 1e-8

    def total(self, tol=None):
        tol = self.tol if tol is None else tol
        main = _mass_over_disk(self.evaluate, 0.0, self.split_radius,
                               self.singular_points, tol / 2)
        tail = 0.0
        if self.tail_evaluate is not None:
            tail_sing = ()
            sqrt_origin = self.tail_singularity == "inv_abs"
            if self.tail_singularity == "excluded_pole":
                raise ValueError("total mass diverges: pole at infinity")
            tail = _mass_over_disk(self.tail_evaluate, 0.0, 1.0 / self.split_radius,
                                   tail_sing, tol / 2, sqrt_center_origin=sqrt_origin)
        return self.sheets * (main + tail)

    def mass_in_disk(self, center, radius, tol=None):
        tol = self.tol if tol is None else tol
        center = complex(center)
        if abs(center) + radius > self.split_radius:
            raise ValueError("disk query crosses the chart split radius")
        return self.sheets * _mass_over_disk(self.evaluate, center, radius,
                                             self.singular_points, tol)

    def integrate(self, h, tol=None):
        """Pairing with a compactly supported chart test function carrying
        .support = (center, radius)."""
        tol = self.tol if tol is None else tol
        center, radius = h.support
        center = complex(center)

        def weighted(x):
            return np.real(h(x)) * self.evaluate(x)

        if abs(center) + radius > self.split_radius:
            raise ValueError("test function support crosses the split radius")
        return self.sheets * _mass_over_disk(weighted, center, radius,
                                             self.singular_points, tol)


def _boundary_singular_piece(f, chi_weight, e, delta, center, radius, tol):
    """Integral of chi * f over D(e, delta) intersected with the query disk
    D(center, radius), for a singular point e sitting ON the query boundary.

    With x = e + s^2 and w = e - center (|w| = radius) the clip condition
    |w + s^2| <= radius becomes r^2 <= -2 radius cos(2 psi - arg w) in polar
    s = r e^{i psi}; the preimage is two symmetric polar cones, so four
    times one cone of the substituted (smooth) integrand."""
    w = e - center
    phi = float(np.angle(w))
    cap = np.sqrt(delta)
    xg, wg = _gl_nodes(24)

    def cone_slice(psis):
        psis = np.atleast_1d(psis)
        out = np.zeros(len(psis))
        for i, psi in enumerate(psis):
            c = -np.cos(2.0 * psi - phi)
            if c <= 0:
                continue
            rmax = min(np.sqrt(2.0 * radius * c), cap)
            r = 0.5 * rmax * (xg + 1.0)
            s = r * np.exp(1j * psi)
            x = e + s * s
            # integrand F(e+s^2) |s|^2 against dA_s = r dr dpsi
            vals = chi_weight(x) * np.real(f(x)) * r**3
            out[i] = 0.5 * rmax * np.sum(vals * wg)
        return out

    lo = 0.5 * phi + 0.25 * np.pi
    hi = 0.5 * phi + 0.75 * np.pi
    piece = _adaptive_1d(cone_slice, lo, hi, tol / 4.0)
    return 4.0 * float(np.real(piece))


def _mass_over_disk(f, center, radius, singular_points, tol, sqrt_center_origin=False):
    """Integral of f over a disk, with declared integrable singularities
    removed by the substitution x = s0 + s^2 on small subdisks and a smooth
    partition of unity gluing the pieces.  Singular points on the query
    boundary get an exactly clipped substitution cone."""
    center = complex(center)
    margin = 1e-8 * (1.0 + radius)
    inside, boundary = [], []
    for sp in singular_points:
        d = abs(sp.location - center)
        if d >= radius + margin:
            continue
        if sp.kind == "excluded_pole":
            raise ValueError("query region contains a non-integrable pole")
        if d > radius - margin:
            boundary.append(complex(sp.location))
        else:
            inside.append(complex(sp.location))
    if sqrt_center_origin:
        if inside or boundary:
            raise ValueError("origin substitution cannot be combined with "
                             "interior singular points")
        return area_disk(f, center, radius, tol, sqrt_center=True)
    if not inside and not boundary:
        return area_disk(f, center, radius, tol)

    # subdisk radius around each singular point
    special = inside + boundary
    deltas = []
    for i, s in enumerate(special):
        lim = 0.35 * radius
        if i < len(inside):
            lim = min(lim, 0.9 * (radius - abs(s - center)))
        for j, s2 in enumerate(special):
            if j != i:
                lim = min(lim, 0.45 * abs(s - s2))
        if lim <= 0:
            raise ValueError("singular points too close to separate")
        deltas.append(lim)

    def chi(x, s, delta):
        r = np.abs(x - s)
        return 1.0 - smooth_step(2.0 * r / delta - 1.0)  # 1 on r<delta/2, 0 on r>delta

    pieces = 0.0
    n = len(special)
    for i, (s, delta) in enumerate(zip(special, deltas)):
        def weight(x, s=s, delta=delta):
            return chi(x, s, delta)

        def shifted(x, s=s, delta=delta):
            return chi(x, s, delta) * f(x)

        if i < len(inside):
            pieces += area_disk(shifted, s, delta, tol / (2 * n), sqrt_center=True)
        else:
            pieces += _boundary_singular_piece(f, weight, s, delta, center,
                                               radius, tol / (2 * n))

    def remainder(x):
        w = np.ones(np.shape(x), dtype=float)
        for s, delta in zip(special, deltas):
            w = w * (1.0 - chi(x, s, delta))
        out = np.zeros(np.shape(x), dtype=float)
        live = w > 0
        if np.any(live):
            out[live] = w[live] * np.real(f(np.asarray(x)[live]))
        return out

    return pieces + area_disk(remainder, center, radius, tol / 2)


@dataclass(frozen=True)
class UnionMeasure:
    """Measure on a disjoint union, one measure per component tag."""

    parts: tuple  # ((component, measure), ...)

    @property
    def total(self):
        out = 0.0
        for _, mu in self.parts:
            out += mu.total() if isinstance(mu, DensityMeasure) else mu.total
        return out

    def component(self, tag):
        for name, mu in self.parts:
            if name == tag:
                return mu
        raise KeyError(tag)


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class TestFunction:
    """Bounded Lipschitz chart function with recorded Lipschitz constant and
    compact support (bumps) or a windowed moment."""

    name: str
    func: object
    support: tuple  # (center, radius)
    lipschitz: float
    component: str = "main"

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=complex))


@dataclass(frozen=True)
class TestFamily:
    functions: tuple
    version: str = TEST_FAMILY_VERSION

    def __iter__(self):
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)


def _bump(center, radius):
    center = complex(center)

    def f(x):
        return bump_profile(np.abs(x - center) / radius)

    # sup |d/drho bump_profile| evaluated on a fine grid, fixed constant
    lip = 1.3054 / radius
    return TestFunction(f"bump({center:.3g},r={radius:.3g})", f, (center, radius), lip)


def _moment(power, part, window):
    scale = 1.2 * window

    def f(x):
        x = np.asarray(x, dtype=complex)
        vals = (x / scale) ** power
        cut = 1.0 - smooth_step((np.abs(x) - window) / (0.2 * window))
        v = vals.real if part == "re" else vals.imag
        return v * cut

    rho = np.linspace(0, 1.2 * window, 2001)[1:]
    prof = (rho / scale) ** power * (1.0 - smooth_step((rho - window) / (0.2 * window)))
    lip = float(np.max(np.abs(np.diff(prof) / np.diff(rho)))) + power / scale
    return TestFunction(f"moment{part}{power}", f, (0.0, 1.2 * window), lip)


def make_test_family(window_center=0.0, window_radius=1.6, grid=4,
                     bump_radius=None, moments=(1, 2), exclude_disk=None,
                     component="main"):
    """The fixed diagnostic family: grid x grid bumps covering the window
    plus low-order windowed moments.  Bumps overlapping `exclude_disk`
    (center, radius) are dropped, which keeps supports inside the region
    under study."""
    window_center = complex(window_center)
    if bump_radius is None:
        bump_radius = 1.05 * window_radius / grid
    funcs = []
    ticks = np.linspace(-window_radius, window_radius, grid)
    for re in ticks:
        for im in ticks:
            c = window_center + re + 1j * im
            if exclude_disk is not None:
                ec, er = exclude_disk
                if abs(c - ec) - bump_radius < er:
                    continue
            funcs.append(_bump(c, bump_radius))
    if exclude_disk is None:
        for k in moments:
            funcs.append(_moment(k, "re", abs(window_center) + window_radius))
            funcs.append(_moment(k, "im", abs(window_center) + window_radius))
    if component != "main":
        from dataclasses import replace

        funcs = [replace(f, component=component) for f in funcs]
    return TestFamily(tuple(funcs))


# ---------------------------------------------------------------------------
# operations


def mass_in_disk(mu, center, radius, tol=None):
    """Measure of the chart disk (all sheets) under mu."""
    if radius <= 0:
        raise ValueError("disk radius must be positive")
    if isinstance(mu, PointMeasure):
        return mu.mass_in_disk(center, radius)
    if isinstance(mu, DensityMeasure):
        return mu.mass_in_disk(center, radius, tol)
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def integrate(mu, h, tol=None):
    """Pairing of the measure with a test function."""
    if isinstance(mu, PointMeasure):
        return mu.integrate(h)
    if isinstance(mu, DensityMeasure):
        return mu.integrate(h, tol)
    if isinstance(mu, UnionMeasure):
        comp = getattr(h, "component", "main")
        return integrate(mu.component(comp), h, tol)
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def weak_distance(mu1, mu2, family, tol=None):
    """max over the family of |int h dmu1 - int h dmu2|; a pseudometric for
    the fixed family."""
    best = 0.0
    for h in family:
        d = abs(integrate(mu1, h, tol) - integrate(mu2, h, tol))
        best = max(best, d)
    return best
