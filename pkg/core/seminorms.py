"""
Campanato, Lipschitz and weighted Bloch seminorm estimators

Square statistics are zonal statistics over axis-parallel squares: means and
mean oscillations of grid samples whose cell centers fall in Q (or Q n Omega).
"""
import math
import warnings
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from utils.logger_config import logger
from .errors import DomainError, PreconditionError, ResolutionError
from .geometry import PlanarDomain, Square, boundary_distance, contains
from .grid_function import GridFunction
from .moduli import Modulus

CENTERINGS = ('mean', 'median')
BLOCH_SIDES = ('interior', 'exterior', 'both')
MIN_CELLS_PER_SQUARE = 16
EXHAUSTIVE_PAIR_LIMIT = 2000
MAX_PAIRS = 10 ** 6


@dataclass(frozen=True)
class ScaleSupremum:
    """Supremum restricted to one scale and where it is attained"""
    scale: float
    value: float
    where: Any


@dataclass(frozen=True)
class SeminormEstimate:
    """Seminorm sweep result: overall value, maximizer and per-scale profile"""
    value: float
    argmax: Any
    per_scale: Tuple[ScaleSupremum, ...]
    kind: str = 'campanato'

    @property
    def argmax_square(self) -> Optional[Square]:
        return self.argmax if isinstance(self.argmax, Square) else None

    def restricted_to(self, min_scale: float) -> 'SeminormEstimate':
        """Estimate over the scales >= min_scale only (a shallower sweep)"""
        kept = tuple(s for s in self.per_scale if s.scale >= min_scale * (1 - 1e-12))
        return _assemble(kept, self.kind)

    def rows(self) -> List[Dict[str, float]]:
        """CSV rows: scale, sup_at_scale, argmax_cx, argmax_cy"""
        rows = []
        for s in self.per_scale:
            point = _anchor(s.where)
            rows.append({
                'scale': s.scale,
                'sup_at_scale': s.value,
                'argmax_cx': point.real,
                'argmax_cy': point.imag,
            })
        return rows


def _anchor(where) -> complex:
    if isinstance(where, Square):
        return where.center
    if isinstance(where, tuple):
        return 0.5 * (where[0] + where[1])
    return complex(where)


def _assemble(per_scale: Tuple[ScaleSupremum, ...], kind: str) -> SeminormEstimate:
    if not per_scale:
        return SeminormEstimate(0.0, None, (), kind)
    best = max(per_scale, key=lambda s: s.value)
    return SeminormEstimate(best.value, best.where, tuple(per_scale), kind)


def _square_selection(f: GridFunction, Q: Square) -> Tuple[np.ndarray, np.ndarray]:
    if not f.box.contains_square(Q):
        raise PreconditionError(f"Square {Q} is not within the grid box")
    xs, ys = f.axes()
    return (xs >= Q.xmin) & (xs < Q.xmax), (ys >= Q.ymin) & (ys < Q.ymax)


def _block(f: GridFunction, Q: Square, d: Optional[PlanarDomain] = None):
    ix, iy = _square_selection(f, Q)
    values = f.values[np.ix_(ix, iy)]
    if d is None:
        selected = np.ones(values.shape, dtype=bool)
    else:
        selected = contains(d, f.centers()[np.ix_(ix, iy)])
    return values, selected


def square_mean(f: GridFunction, Q: Square) -> complex:
    """
    Integral mean g_Q over the cells with centers in Q

    Args:
        f: Grid function
        Q: Square within the grid box

    Returns:
        Complex mean
    """
    values, _ = _block(f, Q)
    if values.size == 0:
        raise ResolutionError(f"Square {Q} contains no cell centers")
    return complex(values.mean())


def domain_mean(f: GridFunction, Q: Square, d: PlanarDomain) -> complex:
    """
    Integral mean f_{Q|Omega} over cells with centers in Q n Omega

    Args:
        f: Grid function
        Q: Square within the grid box
        d: Domain

    Returns:
        Complex mean
    """
    values, selected = _block(f, Q, d)
    if not selected.any():
        raise ResolutionError(f"Square {Q} meets the domain in no cell center")
    return complex(values[selected].mean())


def mean_oscillation(f: GridFunction, Q: Square, d: Optional[PlanarDomain] = None, p: int = 1) -> float:
    """
    (1/|Q|) int_{Q n Omega} |f - f_{Q|Omega}|^p, to the power 1/p

    Normalised by |Q|, not by |Q n Omega|. Zero when Q misses Omega.
    """
    values, selected = _block(f, Q, d)
    if values.size == 0:
        raise ResolutionError(f"Square {Q} contains no cell centers")
    if not selected.any():
        return 0.0
    dev = np.abs(values[selected] - values[selected].mean())
    cells = values.size
    if p == 1:
        return float(dev.sum() / cells)
    return float(math.sqrt((dev ** 2).sum() / cells))


def _median_center(win: np.ndarray, sel: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', RuntimeWarning)
        re = np.nanmedian(np.where(sel, win.real, np.nan), axis=(-2, -1))
        im = np.nanmedian(np.where(sel, win.imag, np.nan), axis=(-2, -1))
    center = re + 1j * im
    return np.where(np.isfinite(center), center, 0.0)


def campanato_seminorm(f: GridFunction, m: Modulus, p: int = 1, d: Optional[PlanarDomain] = None,
                       depth: int = 5, shifts: int = 4, centering: str = 'mean') -> SeminormEstimate:
    """
    Dyadic sweep estimate of the Campanato seminorm

    Squares of side box.side * 2^-j, j = 0..depth, placed on a lattice with
    step side/shifts and kept inside the grid. Each square contributes
    (1/(omega(l)|Q|)) int_{Q n Omega} |f - c_Q| (p=1) or the root-mean analogue
    (p=2), with c_Q the mean over Q n Omega or, for centering='median', the
    componentwise median.

    Args:
        f: Grid function
        m: Modulus (evaluated as a constant above its cap)
        p: 1 or 2
        d: Domain, or None for the whole plane
        depth: Finest dyadic level J
        shifts: Translates per side length
        centering: 'mean' or 'median'

    Returns:
        SeminormEstimate with argmax square and per-scale suprema
    """
    if p not in (1, 2):
        raise DomainError(f"Campanato exponent must be 1 or 2, got {p}")
    if centering not in CENTERINGS:
        raise DomainError(f"Unknown centering '{centering}'")
    if shifts < 1 or depth < 0:
        raise DomainError(f"Invalid sweep parameters depth={depth}, shifts={shifts}")

    n, h = f.n, f.h
    if (n >> depth) ** 2 < MIN_CELLS_PER_SQUARE:
        raise ResolutionError(
            f"Grid n={n} too coarse for depth {depth}: smallest square needs {MIN_CELLS_PER_SQUARE} cells"
        )

    values = f.values
    mask = None if d is None else contains(d, f.centers())
    per_scale = []
    for j in range(depth + 1):
        k = n >> j
        step = max(1, k // shifts)
        win = sliding_window_view(values, (k, k))[::step, ::step]
        sel = (np.ones(win.shape, dtype=bool) if mask is None
               else sliding_window_view(mask, (k, k))[::step, ::step])
        count = sel.sum(axis=(-2, -1))

        if centering == 'mean':
            center = (np.where(sel, win, 0.0)).sum(axis=(-2, -1)) / np.maximum(count, 1)
        else:
            center = _median_center(win, sel)
        dev = np.where(sel, np.abs(win - center[..., None, None]), 0.0)
        if p == 1:
            osc = dev.sum(axis=(-2, -1)) / (k * k)
        else:
            osc = np.sqrt((dev ** 2).sum(axis=(-2, -1)) / (k * k))
        osc = np.where(count > 0, osc, 0.0)

        scale = k * h
        a, b = np.unravel_index(int(np.argmax(osc)), osc.shape)
        corner = complex(f.box.xmin + a * step * h, f.box.ymin + b * step * h)
        where = Square(corner + complex(0.5 * scale, 0.5 * scale), scale)
        value = float(osc[a, b] / m.capped(scale))
        per_scale.append(ScaleSupremum(scale, value, where))
        logger.debug(f"Campanato scale {scale:.4g}: {osc.size} squares, sup {value:.6g}")

    return _assemble(tuple(per_scale), 'campanato')


def lipschitz_seminorm(points, values, m: Modulus, max_pairs: int = MAX_PAIRS,
                       seed: int = 0) -> SeminormEstimate:
    """
    Sampled Lipschitz seminorm sup |f(z) - f(w)| / omega(|z - w|)

    All pairs up to EXHAUSTIVE_PAIR_LIMIT points, random pairs above. The
    per-scale profile groups pairs into dyadic distance bands (cap * 2^-b).

    Args:
        points: Complex sample points
        values: Samples of f at points
        m: Modulus
        max_pairs: Random pair budget for large samples
        seed: Pair sampling seed

    Returns:
        SeminormEstimate whose argmax is a (z, w) pair
    """
    pts = np.asarray(points, dtype=complex).ravel()
    vals = np.asarray(values, dtype=complex).ravel()
    if pts.size < 2 or pts.size != vals.size:
        raise DomainError("Lipschitz seminorm needs at least two samples with matching values")

    if pts.size <= EXHAUSTIVE_PAIR_LIMIT:
        i, j = np.triu_indices(pts.size, k=1)
    else:
        rng = np.random.default_rng(seed)
        i = rng.integers(0, pts.size, max_pairs)
        j = rng.integers(0, pts.size, max_pairs)

    dist = np.abs(pts[i] - pts[j])
    keep = dist > 0
    if not keep.any():
        raise DomainError("All sample points coincide")
    i, j, dist = i[keep], j[keep], dist[keep]
    if dist.max() > m.cap * (1 + 1e-12):
        raise DomainError(f"Pair distance {dist.max():.4g} exceeds the modulus cap {m.cap}")

    ratio = np.abs(vals[i] - vals[j]) / m.values(dist)
    band = np.floor(np.log2(m.cap / dist)).astype(int)
    per_scale = []
    for b in np.unique(band):
        in_band = np.flatnonzero(band == b)
        top = in_band[np.argmax(ratio[in_band])]
        per_scale.append(ScaleSupremum(m.cap * 2.0 ** -b, float(ratio[top]),
                                       (complex(pts[i[top]]), complex(pts[j[top]]))))
    per_scale.sort(key=lambda s: -s.scale)
    return _assemble(tuple(per_scale), 'lipschitz')


def complex_gradient_norm(f: GridFunction) -> np.ndarray:
    """
    sqrt(|f_z|^2 + |f_zbar|^2) from centred differences

    Border cells, where the stencil does not fit, are NaN.
    """
    v, h = f.values, f.h
    out = np.full(v.shape, np.nan)
    fx = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2 * h)
    fy = (v[1:-1, 2:] - v[1:-1, :-2]) / (2 * h)
    fz = 0.5 * (fx - 1j * fy)
    fzb = 0.5 * (fx + 1j * fy)
    out[1:-1, 1:-1] = np.sqrt(np.abs(fz) ** 2 + np.abs(fzb) ** 2)
    return out


def bloch_seminorm(f: GridFunction, d: PlanarDomain, m: Modulus, collar: Tuple[float, float],
                   side: str = 'interior') -> SeminormEstimate:
    """
    Weighted Bloch seminorm sup |grad f(z)| rho(z) / omega(rho(z)) over a collar

    Args:
        f: Grid function
        d: Domain
        m: Modulus (constant above its cap)
        collar: (rho_min, rho_max) with rho_min >= 4h
        side: 'interior', 'exterior' or 'both' sides of the boundary

    Returns:
        SeminormEstimate with argmax point and dyadic rho-band profile
    """
    rho_min, rho_max = collar
    if side not in BLOCH_SIDES:
        raise DomainError(f"Unknown collar side '{side}'")
    if rho_min < 4 * f.h * (1 - 1e-12):
        raise PreconditionError(f"Collar lower end {rho_min:.4g} below the stencil limit 4h = {4 * f.h:.4g}")
    if not rho_max > rho_min:
        raise DomainError(f"Empty collar ({rho_min}, {rho_max})")

    grad = complex_gradient_norm(f)
    centers = f.centers()
    candidates = np.isfinite(grad)
    if side != 'both':
        inside = contains(d, centers)
        candidates &= inside if side == 'interior' else ~inside

    z = centers[candidates]
    rho = boundary_distance(d, z)
    in_collar = (rho >= rho_min) & (rho <= rho_max)
    if not in_collar.any():
        raise ResolutionError(f"Collar ({rho_min:.4g}, {rho_max:.4g}) contains no cells")

    z, rho = z[in_collar], rho[in_collar]
    q = grad[candidates][in_collar] * rho / m.capped(rho)
    band = np.floor(np.log2(rho_max / rho)).astype(int)
    per_scale = []
    for b in np.unique(band):
        in_band = np.flatnonzero(band == b)
        top = in_band[np.argmax(q[in_band])]
        per_scale.append(ScaleSupremum(rho_max * 2.0 ** -b, float(q[top]), complex(z[top])))
    per_scale.sort(key=lambda s: -s.scale)
    estimate = _assemble(tuple(per_scale), 'bloch')
    logger.debug(f"Bloch ({side}) over {int(in_collar.sum())} cells: {estimate.value:.6g}")
    return estimate


def mean_gap(f: GridFunction, Q: Square) -> float:
    """
    |g_Q - g_{2Q}|

    Args:
        f: Grid function
        Q: Square with 2Q within the grid box

    Returns:
        Gap between the means over Q and its double
    """
    double = Q.dilate(2.0)
    if not f.box.contains_square(double):
        raise PreconditionError(f"Doubled square {double} is not within the grid box")
    return abs(square_mean(f, Q) - square_mean(f, double))


def sup_norm(f: GridFunction, d: Optional[PlanarDomain] = None) -> float:
    """max |f| over the cells inside d (whole grid when d is None)"""
    v = np.abs(f.values)
    if d is not None:
        v = v[contains(d, f.centers())]
    return float(v.max()) if v.size else 0.0
