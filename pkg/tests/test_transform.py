import numpy as np
import pytest

from core.errors import DomainError, PreconditionError
from core.function_family import smooth_bump
from core.geometry import Square, boundary_distance, contains
from core.grid_function import GridFunction, sample_function
from core.transform import (beurling_direct, beurling_direct_many, beurling_multiplier, beurling_spectral,
                            beurling_spectral_padded, excluded_moments, kernel_difference_violations,
                            restricted_beurling)


def middle_half(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    out = np.zeros_like(values)
    out[n // 4:3 * n // 4, n // 4:3 * n // 4] = values[n // 4:3 * n // 4, n // 4:3 * n // 4]
    return out


def test_multiplier_is_unimodular_off_origin():
    mult = beurling_multiplier(32, 0.1)
    assert mult[0, 0] == 0
    modulus = np.abs(mult)
    modulus[0, 0] = 1.0
    np.testing.assert_allclose(modulus, 1.0)


def test_spectral_maps_dbar_to_d():
    sigma = 0.15
    box = Square(0j, 4.0)
    g = sample_function(lambda z: np.exp(-np.abs(z) ** 2 / sigma ** 2), box, 128)
    z = g.centers()
    dbar = g.with_values(middle_half(-(z / sigma ** 2) * g.values))
    d = -(np.conj(z) / sigma ** 2) * g.values
    out = beurling_spectral(dbar)
    np.testing.assert_allclose(out.values, d, atol=1e-8 * np.abs(d).max())


def test_disk_indicator_identity(unit_disk, disk_box):
    chi = sample_function(lambda z: contains(unit_disk, z).astype(float), disk_box, 256)
    out = beurling_spectral(chi, pad_factor=4)
    z = chi.centers()

    interior = contains(unit_disk, z) & (boundary_distance(unit_disk, z) >= 0.25)
    assert np.abs(out.values[interior]).max() <= 0.05

    ring = (np.abs(z) >= 1.5) & (np.abs(z) <= 1.9)
    exact = -1.0 / z[ring] ** 2
    assert np.max(np.abs(out.values[ring] - exact) / np.abs(exact)) <= 0.03


def test_padded_output_preserves_l2_norm():
    rng = np.random.default_rng(0)
    box = Square(0j, 4.0)
    for _ in range(10):
        raw = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
        values = middle_half(raw)
        support = middle_half(np.ones((64, 64))) > 0
        values[support] -= values[support].mean()
        f = GridFunction(box, values)
        out = beurling_spectral_padded(f, pad_factor=4)
        assert out.n == 256
        assert np.linalg.norm(out.values) == pytest.approx(np.linalg.norm(f.values), rel=1e-10)


def test_spectral_rejects_support_outside_middle_half():
    f = sample_function(lambda z: np.ones(z.shape), Square(0j, 4.0), 32)
    with pytest.raises(PreconditionError, match='Support violation'):
        beurling_spectral(f)


def test_spectral_rejects_bad_pad_factor():
    f = sample_function(smooth_bump(0j, 0.5), Square(0j, 4.0), 32)
    with pytest.raises(PreconditionError):
        beurling_spectral(f, pad_factor=1)


@pytest.mark.slow
def test_direct_matches_spectral_on_bump():
    f = sample_function(smooth_bump(0j, 1.0), Square(0j, 4.0), 64)
    spectral = beurling_spectral(f, pad_factor=4).values
    i, j = np.meshgrid(np.arange(1, 63), np.arange(1, 63), indexing='ij')
    points = f.centers()[i, j].ravel()
    direct = beurling_direct_many(f, points, local_correction=True)
    scale = np.abs(spectral).max()
    assert np.max(np.abs(direct - spectral[i, j].ravel())) <= 0.01 * scale


def test_direct_single_point_matches_batch():
    f = sample_function(smooth_bump(0.1j, 0.6), Square(0j, 4.0), 32)
    z = complex(f.centers()[20, 11])
    assert beurling_direct(f, z) == pytest.approx(beurling_direct_many(f, [z])[0])


def test_direct_far_field_of_small_bump():
    f = sample_function(smooth_bump(0j, 0.3), Square(0j, 4.0), 128)
    mass = f.values.sum() * f.h ** 2
    z = 1.7 + 0.4j
    assert beurling_direct(f, z) == pytest.approx(-mass / (np.pi * z ** 2), rel=0.02)


def test_direct_rejects_outside_points_and_small_radius():
    f = sample_function(smooth_bump(0j, 0.5), Square(0j, 4.0), 32)
    with pytest.raises(DomainError):
        beurling_direct(f, 3.0 + 0j)
    with pytest.raises(PreconditionError):
        beurling_direct(f, 0j, exclusion_radius=f.h)


def test_excluded_moments_area():
    area, _ = excluded_moments(2.0)
    assert area == 9.0


def test_restricted_transform_vanishes_outside(unit_disk, disk_box):
    f = sample_function(lambda z: np.cos(3 * z.real), disk_box, 64)
    out = restricted_beurling(unit_disk, f)
    outside = ~contains(unit_disk, f.centers())
    assert np.all(out.values[outside] == 0)


def test_restricted_transform_box_mismatch(unit_disk):
    f = sample_function(lambda z: np.ones(z.shape), Square(0j, 1.0), 16)
    with pytest.raises(PreconditionError, match='Box mismatch'):
        restricted_beurling(unit_disk, f)


def test_restricted_transform_unknown_method(unit_disk, disk_box):
    f = sample_function(lambda z: np.ones(z.shape), disk_box, 16)
    with pytest.raises(PreconditionError):
        restricted_beurling(unit_disk, f, method='fmm')


def test_spectral_is_linear():
    rng = np.random.default_rng(9)
    box = Square(0j, 4.0)
    f = GridFunction(box, middle_half(rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))))
    g = GridFunction(box, middle_half(rng.normal(size=(64, 64))))
    a, b = 2.0 - 1.5j, -0.75
    both = beurling_spectral(f.with_values(a * f.values + b * g.values))
    separate = a * beurling_spectral(f).values + b * beurling_spectral(g).values
    np.testing.assert_allclose(both.values, separate, atol=1e-12 * np.abs(separate).max())


def test_restricted_direct_is_linear(unit_disk, disk_box):
    f = sample_function(lambda z: z.real, disk_box, 32)
    g = sample_function(lambda z: np.ones(z.shape), disk_box, 32)
    both = restricted_beurling(unit_disk, f.with_values(f.values + 2 * g.values), method='direct')
    separate = (restricted_beurling(unit_disk, f, method='direct').values
                + 2 * restricted_beurling(unit_disk, g, method='direct').values)
    np.testing.assert_allclose(both.values, separate, atol=1e-12)


def test_kernel_difference_bound_holds():
    assert kernel_difference_violations(10_000, seed=0, constant=12.0) == 0
