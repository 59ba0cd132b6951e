"""
Whole-plane extension of functions on a domain by reflection across the boundary
"""
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import ndimage
from scipy.interpolate import RegularGridInterpolator

from utils.logger_config import logger
from .errors import PreconditionError
from .geometry import PlanarDomain, Square, contains, disk_domain
from .grid_function import GridFunction

# Collar r(theta) <= rho < (1 + COLLAR_FRACTION) r(theta)
COLLAR_FRACTION = 0.25


def fill_from_interior(f: GridFunction, d: PlanarDomain) -> np.ndarray:
    """Replace samples outside Omega by the nearest interior sample"""
    mask = contains(d, f.centers())
    if mask.all() or not mask.any():
        return np.array(f.values)
    _, (ii, jj) = ndimage.distance_transform_edt(~mask, return_indices=True)
    return f.values[ii, jj]


def bilinear(f: GridFunction, values: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Bilinear interpolant of cell-center samples, linear extrapolation at the rim"""
    xs, ys = f.axes()
    real = RegularGridInterpolator((xs, ys), values.real, method='linear', bounds_error=False, fill_value=None)
    imag = RegularGridInterpolator((xs, ys), values.imag, method='linear', bounds_error=False, fill_value=None)

    def evaluate(z: np.ndarray) -> np.ndarray:
        pts = np.column_stack([np.real(z).ravel(), np.imag(z).ravel()])
        return (real(pts) + 1j * imag(pts)).reshape(np.shape(z))

    return evaluate


def _check_boxes(d: PlanarDomain, f: GridFunction, target_box: Square):
    if not target_box.contains_square(d.bounding_box):
        raise PreconditionError("Target box too small: it must contain the domain's closure")
    if not f.box.contains_square(d.bounding_box):
        raise PreconditionError("The input grid box must contain the domain's closure")


def _target_grid(f: GridFunction, target_box: Square, n: Optional[int]) -> GridFunction:
    return GridFunction(target_box, np.zeros((n or f.n,) * 2, dtype=complex))


def disk_reflect_extend(f: GridFunction, target_box: Square, n: Optional[int] = None) -> GridFunction:
    """
    Extension across the unit circle by z -> 1/conj(z)

    Args:
        f: Grid function with meaningful values on the unit disk
        target_box: Box of the extension, containing the closed unit disk
        n: Cells per side of the result, defaults to f.n

    Returns:
        GridFunction equal to f on D and to f(1/conj(z)) outside
    """
    disk = disk_domain(1.0)
    _check_boxes(disk, f, target_box)
    out = _target_grid(f, target_box, n)
    z = out.centers()
    filled = fill_from_interior(f, disk)
    interp = bilinear(f, filled)

    inside = np.abs(z) < 1.0
    values = np.zeros(z.shape, dtype=complex)
    if target_box == f.box and out.n == f.n:
        values[inside] = filled[inside]
    else:
        values[inside] = interp(z[inside])

    src_centers = f.centers()
    innermost = np.unravel_index(int(np.argmin(np.abs(src_centers))), src_centers.shape)
    r_in = max(float(np.abs(src_centers[innermost])), 0.5 * f.h)
    far = ~inside & (np.abs(z) > 1.0 / r_in)
    near = ~inside & ~far
    values[near] = interp(1.0 / np.conj(z[near]))
    values[far] = f.values[innermost]
    return out.with_values(values)


def collar_map(d: PlanarDomain, z: np.ndarray, collar: float = COLLAR_FRACTION) -> np.ndarray:
    """
    Radial quasi-reflection z = rho e^{i theta} -> (r(theta)^2 / rho) e^{i theta}

    Points beyond the outer collar edge are mapped as if on that edge.
    """
    z = np.asarray(z, dtype=complex)
    theta = np.angle(z)
    r = d.profile(theta)
    rho = np.minimum(np.abs(z), (1.0 + collar) * r)
    return (r * r / rho) * np.exp(1j * theta)


def collar_reflect_extend(d: PlanarDomain, f: GridFunction, target_box: Square,
                          n: Optional[int] = None, collar: float = COLLAR_FRACTION) -> GridFunction:
    """
    Extension of f by the radial reflection in a boundary collar

    Args:
        d: Star domain (a disk is the trivial star)
        f: Grid function with meaningful values on Omega
        target_box: Box of the extension, containing the domain's closure
        n: Cells per side of the result, defaults to f.n
        collar: Relative collar width

    Returns:
        GridFunction equal to f on Omega, reflected in the collar and
        constant along rays beyond it
    """
    _check_boxes(d, f, target_box)
    out = _target_grid(f, target_box, n)
    z = out.centers()
    filled = fill_from_interior(f, d)
    interp = bilinear(f, filled)

    inside = contains(d, z)
    values = np.zeros(z.shape, dtype=complex)
    if target_box == f.box and out.n == f.n:
        values[inside] = filled[inside]
    else:
        values[inside] = interp(z[inside])
    values[~inside] = interp(collar_map(d, z[~inside], collar))

    logger.debug(f"Collar extension with bilipschitz constant M = {reflection_bilipschitz_constant(d, collar):.4f}")
    return out.with_values(values)


@lru_cache(maxsize=32)
def reflection_bilipschitz_constant(d: PlanarDomain, collar: float = COLLAR_FRACTION,
                                    samples: int = 2000, seed: int = 0) -> float:
    """
    Empirical bilipschitz constant M of the collar reflection

    max(|R z - R w| / |z - w|, |z - w| / |R z - R w|) over random collar pairs.
    """
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, samples)
    stretch = rng.uniform(1.0, 1.0 + collar, samples)
    z = stretch * d.profile(theta) * np.exp(1j * theta)
    image = collar_map(d, z, collar)

    i, j = np.triu_indices(samples, k=1)
    ratio = np.abs(image[i] - image[j]) / np.abs(z[i] - z[j])
    constant = float(max(ratio.max(), 1.0 / ratio.min()))
    logger.debug(f"Reflection bilipschitz constant over {samples} collar points: {constant:.4f}")
    return constant
