"""
Beurling transform B and restricted transform B_Omega on grid functions

Two evaluation paths: the Fourier multiplier conj(xi)/xi on a zero-padded
grid (fast), and midpoint-rule principal-value quadrature of
-1/pi * int f(u)/(z-u)^2 dA(u) (slow oracle).
"""
import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import fft, integrate, ndimage

from utils.logger_config import logger
from .errors import DomainError, PreconditionError
from .geometry import PlanarDomain, contains
from .grid_function import GridFunction

METHODS = ('spectral', 'direct')
DEFAULT_PAD = 4
# Kernel matrix entries processed per chunk of the direct quadrature
_CHUNK_ENTRIES = 2 ** 22


def check_middle_half_support(f: GridFunction, rtol: float = 1e-12):
    """Raise unless f vanishes outside the middle half of its box"""
    v = np.abs(f.values)
    scale = v.max()
    if scale == 0:
        return
    q = f.n // 4
    outside = v.copy()
    outside[q:f.n - q, q:f.n - q] = 0.0
    if outside.max() > rtol * scale:
        raise PreconditionError(
            "Support violation: spectral input must vanish outside the middle half of its box"
        )


@lru_cache(maxsize=8)
def beurling_multiplier(size: int, spacing: float) -> np.ndarray:
    """conj(xi)/xi on the DFT frequency grid, 0 at xi = 0"""
    freqs = fft.fftfreq(size, d=spacing)
    xi = freqs[:, None] + 1j * freqs[None, :]
    mult = np.zeros((size, size), dtype=complex)
    nonzero = xi != 0
    mult[nonzero] = np.conj(xi[nonzero]) / xi[nonzero]
    mult.setflags(write=False)
    return mult


def _spectral_padded_values(f: GridFunction, pad_factor: int) -> Tuple[np.ndarray, int]:
    if int(pad_factor) != pad_factor or pad_factor < 2:
        raise PreconditionError(f"pad_factor must be an integer >= 2, got {pad_factor}")
    check_middle_half_support(f)

    size = int(pad_factor) * f.n
    offset = (size - f.n) // 2
    padded = np.zeros((size, size), dtype=complex)
    padded[offset:offset + f.n, offset:offset + f.n] = f.values

    spectrum = fft.fft2(padded, workers=-1)
    out = fft.ifft2(spectrum * beurling_multiplier(size, f.h), workers=-1)
    return out, offset


def beurling_spectral_padded(f: GridFunction, pad_factor: int = DEFAULT_PAD) -> GridFunction:
    """
    Spectral Beurling transform on the whole padded grid

    Args:
        f: Input supported in the middle half of its box
        pad_factor: Padding factor; the padded grid size must stay a power of 2

    Returns:
        GridFunction on the concentric box of side pad_factor * box.side
    """
    out, _ = _spectral_padded_values(f, pad_factor)
    return GridFunction(f.box.dilate(pad_factor), out)


def beurling_spectral(f: GridFunction, pad_factor: int = DEFAULT_PAD) -> GridFunction:
    """
    Spectral Beurling transform cropped to the original box

    Args:
        f: Input supported in the middle half of its box
        pad_factor: Zero-padding factor (>= 2)

    Returns:
        Approximation of Bf on f.box
    """
    out, offset = _spectral_padded_values(f, pad_factor)
    logger.debug(f"Spectral transform: n={f.n}, padded to {out.shape[0]}")
    return GridFunction(f.box, out[offset:offset + f.n, offset:offset + f.n])


def excluded_offsets(ratio: float) -> Tuple[np.ndarray, np.ndarray]:
    """Integer cell offsets strictly inside the exclusion disk of radius ratio * h"""
    reach = int(math.ceil(ratio))
    i, j = np.meshgrid(np.arange(-reach, reach + 1), np.arange(-reach, reach + 1), indexing='ij')
    inside = np.hypot(i, j) < ratio
    return i[inside], j[inside]


def _center_cell_moment() -> float:
    # int over [-1/2,1/2]^2 of cos(4 theta), in polar coordinates
    value, _ = integrate.quad(
        lambda t: math.cos(4 * t) * 0.5 * (0.5 / max(abs(math.cos(t)), abs(math.sin(t)))) ** 2,
        0.0, 2 * math.pi, points=[k * math.pi / 4 for k in range(1, 8)], limit=200
    )
    return value


@lru_cache(maxsize=16)
def excluded_moments(ratio: float) -> Tuple[float, float]:
    """
    Moments of the excluded cell union in units of h^2

    Returns:
        (area, int (conj(w)/w)^2 dA) over the union of excluded cells
    """
    di, dj = excluded_offsets(ratio)
    nodes, weights = leggauss(8)
    gx, gy = np.meshgrid(0.5 * nodes, 0.5 * nodes, indexing='ij')
    gw = 0.25 * np.outer(weights, weights)

    moment = 0.0
    for a, b in zip(di, dj):
        if a == 0 and b == 0:
            moment += _center_cell_moment()
            continue
        w = (a + gx) + 1j * (b + gy)
        moment += float(np.sum(gw * np.real((np.conj(w) / w) ** 2)))
    return float(len(di)), moment


def wirtinger_second(f: GridFunction, i: np.ndarray, j: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Centred-difference f_zz and f_zbarzbar at interior cells (i, j)"""
    v, h2 = f.values, f.h ** 2
    fxx = (v[i + 1, j] - 2 * v[i, j] + v[i - 1, j]) / h2
    fyy = (v[i, j + 1] - 2 * v[i, j] + v[i, j - 1]) / h2
    fxy = (v[i + 1, j + 1] - v[i + 1, j - 1] - v[i - 1, j + 1] + v[i - 1, j - 1]) / (4 * h2)
    return 0.25 * (fxx - fyy - 2j * fxy), 0.25 * (fxx - fyy + 2j * fxy)


def beurling_direct_many(f: GridFunction, points, exclusion_radius: Optional[float] = None,
                         local_correction=False) -> np.ndarray:
    """
    Direct principal-value quadrature at many evaluation points

    Args:
        f: Input grid function
        points: Complex evaluation points inside f.box
        exclusion_radius: Radius of the excluded neighbourhood (>= 2h), default 2h
        local_correction: False, True, or a boolean array per point selecting
            where the second-order contribution of the excluded cells is added

    Returns:
        Complex array of Bf(points)
    """
    h = f.h
    radius = 2.0 * h if exclusion_radius is None else float(exclusion_radius)
    if radius < 2.0 * h * (1 - 1e-12):
        raise PreconditionError(f"exclusion_radius {radius:.4g} must be at least 2h = {2 * h:.4g}")

    z = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    inside = ((z.real >= f.box.xmin) & (z.real <= f.box.xmax)
              & (z.imag >= f.box.ymin) & (z.imag <= f.box.ymax))
    if not np.all(inside):
        raise DomainError("Evaluation point outside the grid box")

    centers = f.centers().ravel()
    vals = f.values.ravel()
    active = vals != 0
    src, src_vals = centers[active], vals[active]

    out = np.zeros(z.shape, dtype=complex)
    if src.size:
        step = max(1, _CHUNK_ENTRIES // src.size)
        for start in range(0, z.size, step):
            block = z[start:start + step, None] - src[None, :]
            dist = np.abs(block)
            kernel = np.zeros_like(block)
            keep = dist >= radius
            kernel[keep] = 1.0 / block[keep] ** 2
            out[start:start + step] = kernel @ src_vals
    out *= -(h * h) / math.pi

    correct = np.broadcast_to(np.asarray(local_correction, dtype=bool), z.shape)
    if np.any(correct):
        area, moment = excluded_moments(radius / h)
        idx = np.array([f.cell_index(p) for p in z[correct]]).reshape(-1, 2)
        i, j = idx[:, 0], idx[:, 1]
        if np.any((i < 1) | (i > f.n - 2) | (j < 1) | (j > f.n - 2)):
            raise PreconditionError("Local correction needs a full difference stencil around each point")
        fzz, fzbzb = wirtinger_second(f, i, j)
        out[correct] -= (h * h / math.pi) * 0.5 * (fzz * area + fzbzb * moment)
    return out


def beurling_direct(f: GridFunction, z: complex, exclusion_radius: Optional[float] = None,
                    local_correction: bool = False) -> complex:
    """
    Direct principal-value quadrature of Bf at one point

    Args:
        f: Input grid function
        z: Evaluation point inside f.box
        exclusion_radius: Excluded neighbourhood radius (>= 2h), default 2h
        local_correction: Add the second-order contribution of the excluded cells

    Returns:
        Complex value of Bf(z)
    """
    return complex(beurling_direct_many(f, [z], exclusion_radius, local_correction)[0])


def restricted_beurling(d: PlanarDomain, f: GridFunction, method: str = 'spectral',
                        pad_factor: int = DEFAULT_PAD, exclusion_radius: Optional[float] = None,
                        local_correction: bool = True) -> GridFunction:
    """
    Restricted Beurling transform B_Omega f = B(chi_Omega f) on Omega

    Args:
        d: Domain
        f: Input grid function whose box contains the domain's bounding box
        method: 'spectral' or 'direct'
        pad_factor: Padding factor of the spectral path
        exclusion_radius: Exclusion radius of the direct path
        local_correction: Direct path only; corrects cells whose excluded
            neighbourhood lies inside Omega

    Returns:
        GridFunction vanishing outside Omega
    """
    if method not in METHODS:
        raise PreconditionError(f"Unknown transform method '{method}', expected one of {METHODS}")
    if not f.box.contains_square(d.bounding_box):
        raise PreconditionError("Box mismatch: the grid box must contain the domain's bounding box")

    mask = contains(d, f.centers())
    masked = f.with_values(np.where(mask, f.values, 0.0))

    if method == 'spectral':
        out = np.where(mask, beurling_spectral(masked, pad_factor).values, 0.0)
    else:
        radius = 2.0 * f.h if exclusion_radius is None else exclusion_radius
        di, dj = excluded_offsets(radius / f.h)
        reach = int(np.max(np.abs(np.concatenate([di, dj, [1]]))))
        footprint = np.zeros((2 * reach + 1, 2 * reach + 1), dtype=bool)
        footprint[di + reach, dj + reach] = True
        footprint[reach - 1:reach + 2, reach - 1:reach + 2] = True
        interior = ndimage.binary_erosion(mask, structure=footprint, border_value=0)
        correct = interior[mask] if local_correction else False

        out = np.zeros((f.n, f.n), dtype=complex)
        out[mask] = beurling_direct_many(masked, f.centers()[mask], radius, correct)

    logger.debug(f"Restricted transform ({method}) on {int(mask.sum())} interior cells")
    return f.with_values(out)


def kernel_difference(u, z, w) -> np.ndarray:
    """|1/(u-z)^2 - 1/(u-w)^2|"""
    u, z, w = (np.asarray(a, dtype=complex) for a in (u, z, w))
    return np.abs(1.0 / (u - z) ** 2 - 1.0 / (u - w) ** 2)


def kernel_difference_violations(count: int = 10_000, seed: int = 0, constant: float = 12.0) -> int:
    """
    Count random triples violating |K(u-z) - K(u-w)| <= C |z-w| / |u-z|^3

    Triples satisfy |u - z| >= 2 |z - w|.
    """
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1, 1, count) + 1j * rng.uniform(-1, 1, count)
    w = z + rng.uniform(1e-3, 0.5, count) * np.exp(2j * np.pi * rng.uniform(size=count))
    gap = np.abs(z - w)
    u = z + 2 * gap * rng.uniform(1.0, 20.0, count) * np.exp(2j * np.pi * rng.uniform(size=count))
    bound = constant * gap / np.abs(u - z) ** 3
    violations = int(np.sum(kernel_difference(u, z, w) > bound))
    logger.debug(f"Kernel difference bound: {violations} violations out of {count}")
    return violations
