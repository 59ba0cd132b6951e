"""
Test-function families for the experiments

Lacunary series sit exactly at the Lambda^omega threshold, bumps and smoothed
indicators localise oscillation, holomorphic functions feed the Bloch
embedding checks.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy import ndimage

from utils.logger_config import logger
from .geometry import PlanarDomain, Square, contains
from .grid_function import GridFunction, sample_function
from .moduli import Modulus

FAMILY_KINDS = ('lacunary', 'bump', 'indicator', 'extension')
# Cells per wavelength required of the finest lacunary harmonic
CELLS_PER_WAVE = 8
INDICATOR_SMOOTHING_CELLS = 4


@dataclass(frozen=True)
class FamilyMember:
    """One test function with its identifier"""
    test_id: str
    kind: str
    grid: GridFunction


def resolved_depth(h: float, cells_per_wave: int = CELLS_PER_WAVE, limit: int = 12) -> int:
    """Largest K with the harmonic 2^K resolved by cells_per_wave cells"""
    depth = int(math.floor(math.log2(2 * math.pi / (cells_per_wave * h))))
    return max(1, min(depth, limit))


def lacunary_series(m: Modulus, depth: int, direction: float = 0.0,
                    phases: Optional[Sequence[float]] = None, amplitude: float = 1.0):
    """
    z -> amplitude * sum_{k=1..depth} omega(2^-k) cos(2^k <z, e^{i direction}> + phase_k)

    Returns:
        Vectorized callable of complex z
    """
    k = np.arange(1, depth + 1)
    weights = amplitude * m.capped(2.0 ** -k)
    phases = np.zeros(depth) if phases is None else np.asarray(phases, dtype=float)
    unit = complex(math.cos(direction), math.sin(direction))

    def fn(z):
        z = np.asarray(z, dtype=complex)
        s = np.real(z * np.conj(unit))
        out = np.zeros(z.shape)
        for w, freq, ph in zip(weights, 2.0 ** k, phases):
            out = out + w * np.cos(freq * s + ph)
        return out

    return fn


def smooth_bump(center: complex, radius: float, amplitude: float = 1.0):
    """C-infinity bump exp(1 - 1/(1 - |z-c|^2/R^2)) supported in the disk of radius R"""
    def fn(z):
        t = np.abs(np.asarray(z, dtype=complex) - center) / radius
        out = np.zeros(t.shape)
        inside = t < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
        return amplitude * out

    return fn


def smoothed_indicator(box: Square, n: int, center: complex, radius: float,
                       cells: int = INDICATOR_SMOOTHING_CELLS) -> GridFunction:
    """Indicator of a disk smoothed by a Gaussian of width cells * h"""
    raw = sample_function(lambda z: (np.abs(z - center) < radius).astype(float), box, n)
    smooth = ndimage.gaussian_filter(raw.values.real, sigma=cells, mode='constant')
    return raw.with_values(smooth)


def _random_interior_point(d: PlanarDomain, rng: np.random.Generator, margin: float) -> complex:
    for _ in range(1000):
        z = complex(*rng.uniform(-d.r_min, d.r_min, 2))
        if abs(z) < d.r_min - margin:
            return z
    return 0j


def generate_family(d: PlanarDomain, m: Modulus, box: Square, n: int, size: int,
                    seed: int = 0, amplitude: float = 1.0) -> List[FamilyMember]:
    """
    Mixed test family cycling through lacunary, bump, indicator and extension members

    Args:
        d: Domain
        m: Modulus
        box: Grid box
        n: Cells per side
        size: Number of members
        seed: Random seed
        amplitude: Common scale factor of every member

    Returns:
        List of FamilyMember in a deterministic order
    """
    from .extension import collar_reflect_extend, disk_reflect_extend

    rng = np.random.default_rng(seed)
    h = box.side / n
    depth = resolved_depth(h)
    members = []
    for idx in range(size):
        kind = FAMILY_KINDS[idx % len(FAMILY_KINDS)]
        test_id = f"{kind}-{idx:03d}"
        if kind in ('lacunary', 'extension'):
            fn = lacunary_series(m, depth, direction=rng.uniform(0, np.pi),
                                 phases=rng.uniform(0, 2 * np.pi, depth), amplitude=amplitude)
            grid = sample_function(fn, box, n)
            if kind == 'extension':
                if d.kind == 'disk' and d.radius == 1.0:
                    grid = disk_reflect_extend(grid, box)
                else:
                    grid = collar_reflect_extend(d, grid, box)
        elif kind == 'bump':
            radius = rng.uniform(0.2, 0.5) * d.r_min
            center = _random_interior_point(d, rng, 0.0)
            grid = sample_function(smooth_bump(center, radius, amplitude), box, n)
        else:
            radius = rng.uniform(0.2, 0.6) * d.r_min
            center = _random_interior_point(d, rng, radius)
            grid = smoothed_indicator(box, n, center, radius)
            grid = grid.with_values(amplitude * grid.values)
        members.append(FamilyMember(test_id, kind, grid))

    logger.info(f"Generated test family of {len(members)} functions (lacunary depth {depth})")
    return members


def holomorphic_family(d: PlanarDomain, box: Square, n: int, size: int, seed: int = 0,
                       amplitude: float = 1.0) -> List[FamilyMember]:
    """
    Holomorphic functions bounded on Omega with finite weighted Bloch seminorm

    Cycles through monomials z^k / k, logarithms log(1 - z/a) with a pole-free
    margin |a| = 1.5 r_max, and exponentials exp(c z).
    """
    rng = np.random.default_rng(seed)
    members = []
    for idx in range(size):
        kind = ('polynomial', 'logarithm', 'exponential')[idx % 3]
        if kind == 'polynomial':
            k = idx // 3 + 1
            fn = (lambda z, k=k: amplitude * z ** k / k)
        elif kind == 'logarithm':
            a = 1.5 * d.r_max * np.exp(2j * np.pi * rng.uniform())
            fn = (lambda z, a=a: amplitude * np.log(1.0 - z / a))
        else:
            c = np.exp(2j * np.pi * rng.uniform())
            fn = (lambda z, c=c: amplitude * np.exp(c * z))
        members.append(FamilyMember(f"{kind}-{idx:03d}", kind, sample_function(fn, box, n)))
    return members


def domain_box(d: PlanarDomain, box_side: Optional[float] = None) -> Square:
    """Grid box for experiments: masked inputs stay in the middle half"""
    side = 2.0 * d.bounding_box.side if box_side is None else box_side
    return Square(0j, side)


def masked(member: FamilyMember, d: PlanarDomain) -> GridFunction:
    g = member.grid
    return g.with_values(np.where(contains(d, g.centers()), g.values, 0.0))
