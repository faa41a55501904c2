import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvelab.quadrature import (
    Path,
    QuadratureError,
    Region,
    area_annulus,
    area_disk,
    area_integral,
    path_integral,
)


def agm(a, b, iters=60):
    for _ in range(iters):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return a


def test_residue_circle():
    val = path_integral(lambda z: 1.0 / z, Path.circle(0.0, 1.0), tol=1e-12)
    assert abs(val - 2j * np.pi) < 1e-11


def test_segment_antiderivative():
    val = path_integral(lambda z: 3.0 * z**2, Path.segment(0.0, 1.0), tol=1e-12)
    assert abs(val - 1.0) < 1e-12


def test_cut_loop_matches_agm_elliptic_integral():
    # loop around the cut [k, 1] of dx / sqrt((x^2-1)(x^2-k^2)); the magnitude
    # of the loop integral is 2 K(k') = pi / agm(1, k)
    k = 0.5

    def f(x):
        # branch on the open cut: (x^2-1) < 0, (x^2-k^2) > 0
        return 1.0 / (1j * np.sqrt((1.0 - x**2) * (x**2 - k**2)))

    val = path_integral(f, Path.cut_loop(k, 1.0), tol=1e-12)
    oracle = np.pi / agm(1.0, k)
    assert abs(abs(val) - oracle) < 1e-10


def test_sqrt_endpoint_substitution():
    # int_0^1 dx/sqrt(x) = 2 with a declared singular endpoint
    val = path_integral(
        lambda z: 1.0 / np.sqrt(z), Path.segment(0.0, 1.0, sqrt_start=True), tol=1e-12
    )
    assert abs(val - 2.0) < 1e-11


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**30))
def test_concatenation_additive_and_orientation_reversal(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=4) + 1j * rng.normal(size=4)

    def f(z):
        return c[0] + c[1] * z + c[2] * z**2 + c[3] * np.exp(0.3 * z)

    a, m, b = -1.0 - 0.5j, 0.3 + 0.2j, 1.2 + 0.4j
    whole = path_integral(f, Path.segment(a, b), 1e-11)
    first = path_integral(f, Path.segment(a, m), 1e-11)
    second = path_integral(f, Path.segment(m, b), 1e-11)
    # f is entire, so the integral only depends on the endpoints
    assert abs((first + second) - whole) < 1e-9
    assert abs(path_integral(f, Path.segment(a, b).reversed()) + whole) < 1e-9


def test_failure_carries_best_estimate():
    with pytest.raises(QuadratureError) as err:
        path_integral(lambda z: 1.0 / np.sqrt(np.abs(z - 0.5)), Path.segment(0.0, 1.0), tol=1e-14)
    assert err.value.best is not None


def test_disk_area():
    assert abs(area_disk(lambda z: np.ones_like(z, dtype=float), 0.0, 1.0, 1e-10) - np.pi) < 1e-9


def test_zero_density():
    assert abs(area_disk(lambda z: np.zeros_like(z, dtype=float), 0.3, 2.0, 1e-10)) < 1e-12


def test_annulus_log_oracle():
    # density 2/(4 pi^2 |z|^2) over rho < |z| < 1 integrates to |log rho| / pi
    rho = 0.05

    def dens(z):
        return 2.0 / (4.0 * np.pi**2 * np.abs(z) ** 2)

    val = area_annulus(dens, 0.0, rho, 1.0, 1e-10)
    assert abs(val - abs(np.log(rho)) / np.pi) < 1e-8


def test_sqrt_center_substitution_disk():
    # int over |z|<1 of 1/|z| dA = 2 pi
    val = area_disk(lambda z: 1.0 / np.abs(z), 0.0, 1.0, 1e-10, sqrt_center=True)
    assert abs(val - 2.0 * np.pi) < 1e-8


def test_region_with_exclusions():
    # area of unit disk minus two excluded disks
    excl = ((0.4, 0.1), (-0.35 + 0.2j, 0.15))
    region = Region(0.0, 1.0, exclusions=excl)
    val = area_integral(lambda z: np.ones_like(z, dtype=float), region, 1e-9)
    expected = np.pi * (1.0 - 0.1**2 - 0.15**2)
    assert abs(val - expected) < 1e-7


def test_region_exclusion_validation():
    with pytest.raises(ValueError):
        area_integral(
            lambda z: np.ones_like(z, dtype=float),
            Region(0.0, 1.0, exclusions=((0.95, 0.2),)),
            1e-9,
        )
