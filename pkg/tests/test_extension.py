import numpy as np
import pytest

from core.errors import PreconditionError
from core.extension import (collar_map, collar_reflect_extend, disk_reflect_extend, fill_from_interior,
                            reflection_bilipschitz_constant)
from core.function_family import lacunary_series
from core.geometry import Square, contains
from core.grid_function import sample_function
from core.seminorms import sup_norm


def test_constant_stays_constant(disk_box):
    f = sample_function(lambda z: np.ones(z.shape), disk_box, 64)
    ext = disk_reflect_extend(f, Square(0j, 8.0))
    np.testing.assert_allclose(ext.values, 1.0, atol=1e-12)


def test_disk_reflection_of_modulus(disk_box):
    f = sample_function(np.abs, disk_box, 256)
    ext = disk_reflect_extend(f, Square(0j, 8.0))
    z = ext.centers()
    ring = (np.abs(z) >= 1.9) & (np.abs(z) <= 2.1)
    np.testing.assert_allclose(ext.values[ring].real, 1.0 / np.abs(z[ring]), atol=2 * f.h)


def test_disk_reflection_with_cell_center_at_origin():
    h = 4.0 / 64
    box = Square(complex(h / 2, h / 2), 4.0)
    f = sample_function(lambda z: 3.0 + np.abs(z), box, 64)
    assert np.min(np.abs(f.centers())) == 0.0
    ext = disk_reflect_extend(f, box)
    assert np.all(np.isfinite(ext.values))
    z = ext.centers()
    outside = np.abs(z) > 1.5
    np.testing.assert_allclose(ext.values[outside].real, 3.0 + 1.0 / np.abs(z[outside]), atol=2 * h)


def test_collar_reflection_on_unit_disk_matches_inversion(unit_disk, disk_box, power_half):
    f = sample_function(lacunary_series(power_half, 4, direction=0.4), disk_box, 128)
    target = Square(0j, 4.0)
    by_inversion = disk_reflect_extend(f, target)
    by_collar = collar_reflect_extend(unit_disk, f, target)
    r = np.abs(by_collar.centers())
    collar = (r > 1.01) & (r < 1.24)
    np.testing.assert_allclose(by_collar.values[collar], by_inversion.values[collar], atol=1e-10)


def test_collar_map_inverts_in_the_circle(unit_disk):
    z = np.array([1.1 + 0j, 1.2j, -0.8 - 0.8j])
    np.testing.assert_allclose(collar_map(unit_disk, z), 1.0 / np.conj(z))


def test_extension_is_identity_on_domain(star_power, disk_box, power_half):
    f = sample_function(lacunary_series(power_half, 4), disk_box, 128)
    ext = collar_reflect_extend(star_power, f, disk_box)
    inside = contains(star_power, f.centers())
    np.testing.assert_array_equal(ext.values[inside], f.values[inside])


def test_extension_keeps_sup_norm(star_power, disk_box, power_half):
    f = sample_function(lacunary_series(power_half, 4, direction=1.3), disk_box, 128)
    ext = collar_reflect_extend(star_power, f, disk_box)
    assert sup_norm(ext) == pytest.approx(sup_norm(f, star_power), rel=1e-12)


def test_constant_on_star_domain(star_power, disk_box):
    f = sample_function(lambda z: np.full(z.shape, 2.0), disk_box, 64)
    ext = collar_reflect_extend(star_power, f, Square(0j, 6.0), n=128)
    np.testing.assert_allclose(ext.values, 2.0, atol=1e-12)
    assert ext.n == 128


def test_fill_from_interior_has_interior_values(unit_disk, disk_box):
    f = sample_function(lambda z: np.where(np.abs(z) < 1, 1.0, 5.0), disk_box, 64)
    np.testing.assert_array_equal(fill_from_interior(f, unit_disk), 1.0)


def test_disk_bilipschitz_constant(unit_disk):
    assert 1.0 <= reflection_bilipschitz_constant(unit_disk) <= 1.6


def test_star_bilipschitz_constant_finite(star_power):
    assert 1.0 <= reflection_bilipschitz_constant(star_power) < 10.0


def test_target_box_too_small(unit_disk, disk_box):
    f = sample_function(lambda z: z, disk_box, 32)
    with pytest.raises(PreconditionError):
        collar_reflect_extend(unit_disk, f, Square(0j, 1.5))
    with pytest.raises(PreconditionError):
        disk_reflect_extend(f, Square(0j, 1.5))
