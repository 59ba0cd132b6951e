"""
Planar domains with C^{1,omega} boundary and axis-parallel squares
"""
import math
from dataclasses import dataclass, field
from typing import Any, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.spatial import cKDTree
from shapely.geometry import Polygon, box

from utils.logger_config import logger
from .errors import AmplitudeError, DomainError, GeometryError, PreconditionError
from .moduli import Modulus, dini_integral

DOMAIN_KINDS = ('disk', 'star')

# Angular resolution of profile scans (r_min, coarse distance search)
PROFILE_SAMPLES = 4096
NEWTON_STEPS = 20
NORMAL_SAMPLES = 2048


@dataclass(frozen=True)
class Square:
    """Axis-parallel square Q with center and side length l(Q)"""
    center: complex
    side: float

    def __post_init__(self):
        if not self.side > 0:
            raise DomainError(f"Square side must be positive, got {self.side}")
        object.__setattr__(self, 'center', complex(self.center))

    @property
    def half(self) -> float:
        return 0.5 * self.side

    @property
    def xmin(self) -> float:
        return self.center.real - self.half

    @property
    def xmax(self) -> float:
        return self.center.real + self.half

    @property
    def ymin(self) -> float:
        return self.center.imag - self.half

    @property
    def ymax(self) -> float:
        return self.center.imag + self.half

    @property
    def area(self) -> float:
        return self.side * self.side

    def dilate(self, a: float) -> 'Square':
        """Concentric square aQ"""
        return Square(self.center, a * self.side)

    def contains_points(self, z) -> np.ndarray:
        """Half-open membership [xmin, xmax) x [ymin, ymax)"""
        z = np.asarray(z)
        x, y = z.real, z.imag
        return (x >= self.xmin) & (x < self.xmax) & (y >= self.ymin) & (y < self.ymax)

    def contains_square(self, other: 'Square', tol: float = 1e-12) -> bool:
        slack = tol * max(self.side, other.side)
        return (other.xmin >= self.xmin - slack and other.xmax <= self.xmax + slack
                and other.ymin >= self.ymin - slack and other.ymax <= self.ymax + slack)

    def to_polygon(self) -> Polygon:
        return box(self.xmin, self.ymin, self.xmax, self.ymax)


@dataclass(frozen=True)
class PlanarDomain:
    """
    Disk or star-shaped domain with radial profile

        r(theta) = radius + sum_k a_k cos(k theta) + b_k sin(k theta)

    harmonics holds the (k, a_k, b_k) triples; a disk has none.
    """
    kind: str
    radius: float = 1.0
    harmonics: Tuple[Tuple[int, float, float], ...] = ()
    r_min: float = field(default=0.0, init=False, compare=False)
    r_max: float = field(default=0.0, init=False, compare=False)
    _cache: Any = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise DomainError(f"Unknown domain kind '{self.kind}'")
        if not self.radius > 0:
            raise DomainError(f"Domain radius must be positive, got {self.radius}")
        object.__setattr__(self, 'harmonics',
                           tuple((int(k), float(a), float(b)) for k, a, b in self.harmonics))
        if self.kind == 'disk' and self.harmonics:
            raise DomainError("A disk carries no profile harmonics")

        theta = self.angle_samples()
        r = self.profile(theta)
        object.__setattr__(self, 'r_min', float(r.min()))
        object.__setattr__(self, 'r_max', float(r.max()))
        object.__setattr__(self, '_cache', {})
        if self.r_min <= 0:
            raise AmplitudeError(f"Radial profile is not positive: r_min = {self.r_min:.4g}")

    @property
    def max_harmonic(self) -> int:
        return max((k for k, _, _ in self.harmonics), default=0)

    @property
    def bounding_box(self) -> Square:
        """Square enclosing the closure, from the coefficient bound on r"""
        bound = self.radius + sum(abs(a) + abs(b) for _, a, b in self.harmonics)
        return Square(0j, 2.0 * bound)

    def angle_samples(self, count: int = PROFILE_SAMPLES) -> np.ndarray:
        count = max(count, 16 * self.max_harmonic)
        return 2.0 * np.pi * np.arange(count) / count

    def profile(self, theta, order: int = 0) -> np.ndarray:
        """r(theta) and its derivatives up to order 2"""
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.radius if order == 0 else 0.0)
        for k, a, b in self.harmonics:
            c, s = np.cos(k * theta), np.sin(k * theta)
            if order == 0:
                out = out + a * c + b * s
            elif order == 1:
                out = out + k * (b * c - a * s)
            else:
                out = out - k * k * (a * c + b * s)
        return out

    def boundary_point(self, theta, order: int = 0) -> np.ndarray:
        """gamma(theta) = r(theta) e^{i theta} and its first two derivatives"""
        e = np.exp(1j * np.asarray(theta, dtype=float))
        r = self.profile(theta)
        if order == 0:
            return r * e
        dr = self.profile(theta, 1)
        if order == 1:
            return (dr + 1j * r) * e
        return (self.profile(theta, 2) + 2j * dr - r) * e

    def boundary_tree(self) -> Tuple[np.ndarray, cKDTree]:
        if 'tree' not in self._cache:
            theta = self.angle_samples()
            pts = self.boundary_point(theta)
            self._cache['tree'] = (theta, cKDTree(np.column_stack([pts.real, pts.imag])))
        return self._cache['tree']


def disk_domain(radius: float = 1.0) -> PlanarDomain:
    return PlanarDomain('disk', radius=radius)


def star_domain(harmonics, radius: float = 1.0) -> PlanarDomain:
    return PlanarDomain('star', radius=radius, harmonics=tuple(harmonics))


def contains(d: PlanarDomain, z) -> Union[bool, np.ndarray]:
    """
    Membership in the open domain

    Args:
        d: Domain
        z: Complex scalar or array

    Returns:
        Boolean (array) with z in Omega
    """
    z = np.asarray(z, dtype=complex)
    if d.kind == 'disk':
        inside = np.abs(z) < d.radius
    else:
        inside = np.abs(z) < d.profile(np.angle(z))
    return bool(inside) if inside.ndim == 0 else inside


def boundary_distance(d: PlanarDomain, z) -> Union[float, np.ndarray]:
    """
    Distance rho(z) from z to the boundary

    Star domains: nearest boundary sample from a k-d tree over the angular
    scan, refined by Newton steps on the squared distance.

    Args:
        d: Domain
        z: Complex scalar or array

    Returns:
        rho(z), same shape as z
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)

    if d.kind == 'disk':
        rho = np.abs(d.radius - np.abs(z))
    else:
        theta_samples, tree = d.boundary_tree()
        coarse, idx = tree.query(np.column_stack([z.real.ravel(), z.imag.ravel()]))
        theta = theta_samples[idx]
        flat = z.ravel()
        max_step = 2.0 * np.pi / len(theta_samples)
        for _ in range(NEWTON_STEPS):
            g = d.boundary_point(theta) - flat
            g1 = d.boundary_point(theta, 1)
            g2 = d.boundary_point(theta, 2)
            first = 2.0 * np.real(np.conj(g) * g1)
            second = 2.0 * (np.abs(g1) ** 2 + np.real(np.conj(g) * g2))
            step = np.where(second > 0, first / np.where(second > 0, second, 1.0), 0.0)
            theta = theta - np.clip(step, -max_step, max_step)
        refined = np.abs(d.boundary_point(theta) - flat)
        rho = np.minimum(refined, coarse).reshape(z.shape)

    return float(rho[0]) if scalar else rho


def normal_modulus_constant(d: PlanarDomain, m: Modulus, samples: int = NORMAL_SAMPLES) -> float:
    """
    Empirical Lambda^omega constant of the outward unit normal

    sup |n(s1) - n(s2)| / omega(|s1 - s2|) over an arclength sample, with the
    intrinsic (periodic) arc distance and omega continued as a constant above
    its cap.

    Args:
        d: Domain
        m: Modulus
        samples: Number of arclength sample points

    Returns:
        Supremum over sampled pairs
    """
    dense = np.linspace(0.0, 2.0 * np.pi, 16 * max(samples, 4 * d.max_harmonic) + 1)
    speed = np.abs(d.boundary_point(dense, 1))
    if speed.min() < 1e-12:
        raise GeometryError("Boundary parametrization has a zero-speed point")

    arclength = cumulative_trapezoid(speed, dense, initial=0.0)
    total = arclength[-1]
    s = total * np.arange(samples) / samples
    theta = np.interp(s, arclength, dense)
    tangent = d.boundary_point(theta, 1)
    normal = -1j * tangent / np.abs(tangent)

    gap = np.abs(s[:, None] - s[None, :])
    gap = np.minimum(gap, total - gap)
    jump = np.abs(normal[:, None] - normal[None, :])
    off_diagonal = gap > 0
    ratio = np.zeros_like(gap)
    ratio[off_diagonal] = jump[off_diagonal] / m.capped(gap[off_diagonal])
    constant = float(ratio.max())
    logger.debug(f"Normal modulus constant over {samples} samples: {constant:.6g}")
    return constant


def make_test_domain(m: Modulus, amplitude: float, depth: int) -> PlanarDomain:
    """
    Star domain whose boundary has exactly C^{1,omega} smoothness

        r(theta) = 1 + amplitude * sum_{k=1..depth} 2^-k omega(2^-k) cos(2^k theta)

    Args:
        m: Regular modulus
        amplitude: Perturbation amplitude
        depth: Number of lacunary harmonics

    Returns:
        PlanarDomain (the unit disk when amplitude is 0)
    """
    if depth < 1:
        raise PreconditionError(f"Test domain depth must be at least 1, got {depth}")
    if not math.isfinite(dini_integral(m)):
        raise PreconditionError(f"Test domains need a Dini-smooth modulus, {m.family} is not")
    if amplitude == 0:
        return disk_domain(1.0)

    k = np.arange(1, depth + 1)
    scales = 2.0 ** -k
    coeffs = amplitude * scales * m.capped(scales)
    harmonics = tuple((int(2 ** j), float(c), 0.0) for j, c in zip(k, coeffs))
    try:
        domain = star_domain(harmonics)
    except AmplitudeError as e:
        raise AmplitudeError(f"Amplitude {amplitude} too large for depth {depth}: {e}") from e
    logger.debug(f"Test domain: amplitude={amplitude}, depth={depth}, r_min={domain.r_min:.4f}")
    return domain


def domain_area(d: PlanarDomain) -> float:
    """Area 1/2 int r(theta)^2 dtheta (trapezoid rule, exact for the trigonometric profile)"""
    if d.kind == 'disk':
        return math.pi * d.radius ** 2
    theta = d.angle_samples(max(PROFILE_SAMPLES, 8 * d.max_harmonic))
    return float(np.pi * np.mean(d.profile(theta) ** 2))

