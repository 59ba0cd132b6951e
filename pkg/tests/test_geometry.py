import math

import numpy as np
import pytest
from shapely.geometry import Polygon

from core.errors import AmplitudeError, DomainError, PreconditionError
from core.geometry import (PlanarDomain, Square, boundary_distance, contains, disk_domain, domain_area,
                           make_test_domain, normal_modulus_constant)
from core.moduli import tabulated_modulus


def test_square_bounds_and_dilation():
    q = Square(1 + 2j, 0.5)
    assert (q.xmin, q.xmax, q.ymin, q.ymax) == (0.75, 1.25, 1.75, 2.25)
    assert q.area == 0.25
    assert q.dilate(2.0) == Square(1 + 2j, 1.0)


def test_square_membership_is_half_open():
    q = Square(0j, 2.0)
    inside = q.contains_points(np.array([-1 + 0j, 1 + 0j, 0 - 1j, 0 + 1j, 0.5 + 0.5j]))
    assert inside.tolist() == [True, False, True, False, True]


def test_square_contains_square():
    outer = Square(0j, 2.0)
    assert outer.contains_square(Square(0.5 + 0.5j, 1.0))
    assert not outer.contains_square(Square(0.6 + 0.5j, 1.0))


def test_square_polygon_area():
    assert Square(3 - 1j, 0.5).to_polygon().area == pytest.approx(0.25)


def test_square_rejects_non_positive_side():
    with pytest.raises(DomainError):
        Square(0j, 0.0)


def test_disk_membership_and_distance(unit_disk):
    z = np.array([0j, 0.5 + 0j, 2j, 1 + 0j])
    assert contains(unit_disk, z).tolist() == [True, True, False, False]
    np.testing.assert_allclose(boundary_distance(unit_disk, z), [1.0, 0.5, 1.0, 0.0])
    assert boundary_distance(unit_disk, 0.25j) == pytest.approx(0.75)


def test_star_boundary_distance_matches_dense_scan(star_power):
    theta = np.linspace(0, 2 * np.pi, 400_000, endpoint=False)
    boundary = star_power.boundary_point(theta)
    rng = np.random.default_rng(1)
    z = rng.uniform(-1.3, 1.3, 20) + 1j * rng.uniform(-1.3, 1.3, 20)
    brute = np.array([np.abs(boundary - p).min() for p in z])
    np.testing.assert_allclose(boundary_distance(star_power, z), brute, atol=1e-5)


def test_star_boundary_points_have_zero_distance(star_power):
    pts = star_power.boundary_point(np.linspace(0, 2 * np.pi, 50))
    assert np.all(boundary_distance(star_power, pts) < 1e-8)


def test_star_boundary_distance_is_one_lipschitz(star_power):
    rng = np.random.default_rng(4)
    half = star_power.bounding_box.half
    z = rng.uniform(-half, half, 10_000) + 1j * rng.uniform(-half, half, 10_000)
    w = rng.uniform(-half, half, 10_000) + 1j * rng.uniform(-half, half, 10_000)
    rho_z, rho_w = boundary_distance(star_power, z), boundary_distance(star_power, w)
    assert np.all(rho_z <= np.abs(z - w) + rho_w + 1e-6)


def test_star_interior_disk_consistency(star_power):
    rng = np.random.default_rng(8)
    z = rng.uniform(-1.2, 1.2, 400) + 1j * rng.uniform(-1.2, 1.2, 400)
    inside = contains(star_power, z)
    assert np.all(inside[np.abs(z) < 0.999 * star_power.r_min])
    assert not np.any(inside[np.abs(z) > 1.001 * star_power.r_max])

    z = z[inside]
    rho = boundary_distance(star_power, z)
    z, rho = z[rho > 1e-3], rho[rho > 1e-3]
    unit = np.exp(2j * np.pi * np.arange(8) / 8)
    ring = z[:, None] + 0.98 * rho[:, None] * unit[None, :]
    assert np.all(contains(star_power, ring))


def test_test_domain_zero_amplitude_is_disk(power_half):
    assert make_test_domain(power_half, 0.0, 6) == disk_domain(1.0)


def test_test_domain_harmonics(power_half):
    d = make_test_domain(power_half, 0.1, 4)
    assert [k for k, _, _ in d.harmonics] == [2, 4, 8, 16]
    assert d.harmonics[0][1] == pytest.approx(0.1 * 0.5 * math.sqrt(0.5))
    assert 0 < d.r_min < 1 < d.r_max


def test_test_domain_amplitude_too_large(power_half):
    with pytest.raises(AmplitudeError):
        make_test_domain(power_half, 100.0, 6)


def test_test_domain_needs_dini():
    j = np.arange(60, -1, -1)
    m = tabulated_modulus([(2.0 ** -k, 1.0 / (1.0 + k * math.log(2.0))) for k in j])
    with pytest.raises(PreconditionError):
        make_test_domain(m, 0.1, 6)


def test_test_domain_area_is_even_in_amplitude(power_half):
    a, depth = 0.3, 6
    plus = domain_area(make_test_domain(power_half, a, depth))
    minus = domain_area(make_test_domain(power_half, -a, depth))
    k = np.arange(1, depth + 1)
    c = 2.0 ** -k * power_half.capped(2.0 ** -k)
    assert plus == pytest.approx(minus, rel=1e-12)
    assert plus + minus - 2 * math.pi == pytest.approx(math.pi * a ** 2 * np.sum(c ** 2), rel=1e-9)


def test_domain_area_matches_polygon(star_power):
    pts = star_power.boundary_point(star_power.angle_samples(4096))
    polygon = Polygon(np.column_stack([pts.real, pts.imag]))
    assert domain_area(star_power) == pytest.approx(polygon.area, rel=1e-5)


def test_bounding_box_contains_domain(star_power):
    pts = star_power.boundary_point(np.linspace(0, 2 * np.pi, 1000))
    half = star_power.bounding_box.half + 1e-12
    assert np.all(np.abs(pts.real) <= half) and np.all(np.abs(pts.imag) <= half)


def test_disk_normal_constant(unit_disk, power_half):
    # antipodal normals differ by 2 and omega is 1 beyond its cap
    assert normal_modulus_constant(unit_disk, power_half) == pytest.approx(2.0, abs=1e-6)


def test_star_normal_constant_finite(star_power, power_half):
    constant = normal_modulus_constant(star_power, power_half, samples=512)
    assert 0 < constant < 100


def test_disk_rejects_harmonics():
    with pytest.raises(DomainError):
        PlanarDomain('disk', 1.0, ((2, 0.1, 0.0),))
