"""
Moduli of continuity: evaluation, Dini integrals, regularity certificates
and the conjugate modulus
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from utils.logger_config import logger
from .errors import ConfigError, DomainError, PreconditionError

FAMILIES = ('power', 'log', 'tabulated')

# Geometric grid t = T * 2**-j, j = 0..DYADIC_DEPTH
DYADIC_DEPTH = 30
# Dyadic shells integrated explicitly before the tail
SHELL_COUNT = 40
LN2 = math.log(2.0)

_GL_NODES, _GL_WEIGHTS = leggauss(16)


@dataclass(frozen=True)
class Modulus:
    """
    A modulus of continuity on (0, cap]

    Families:
        power:     t**alpha, 0 < alpha < 1
        log:       (log(e/t))**(-1 - beta), beta > 0, cap <= 1
        tabulated: monotone PCHIP through knots in log t, power-law
                   extrapolation below the smallest knot, constant above
                   the largest knot
    """
    family: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    knots: Tuple[Tuple[float, float], ...] = ()
    cap: float = 1.0
    _interp: Any = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"Unknown modulus family '{self.family}', expected one of {FAMILIES}")
        if not self.cap > 0:
            raise ConfigError(f"Modulus cap must be positive, got {self.cap}")

        if self.family == 'power':
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ConfigError(f"Power modulus needs alpha in (0,1), got {self.alpha}")
        elif self.family == 'log':
            if self.beta is None or not self.beta > 0:
                raise ConfigError(f"Log modulus needs beta > 0, got {self.beta}")
            if self.cap > 1:
                raise ConfigError(f"Log modulus is defined on (0,1], cap {self.cap} too large")
        else:
            self._build_table()

    def _build_table(self):
        if len(self.knots) < 2:
            raise ConfigError("Tabulated modulus needs at least two knots")
        t = np.array([k[0] for k in self.knots], dtype=float)
        v = np.array([k[1] for k in self.knots], dtype=float)
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ConfigError("Tabulated knots must have strictly increasing positive t-values")
        if np.any(v <= 0) or np.any(np.diff(v) < 0):
            raise ConfigError("Tabulated values must be positive and non-decreasing")
        if self.cap < t[0]:
            raise ConfigError(f"Cap {self.cap} lies below the smallest knot {t[0]}")

        log_t = np.log(t)
        slope = math.log(v[1] / v[0]) / (log_t[1] - log_t[0])
        table = {
            'log_t': log_t,
            'values': v,
            'pchip': PchipInterpolator(log_t, v, extrapolate=False),
            'slope': slope,
        }
        object.__setattr__(self, '_interp', table)

    def log_values(self, log_t: np.ndarray) -> np.ndarray:
        """
        Evaluate omega at t = exp(log_t) without forming t

        Deep dyadic shells reach t far below the float range, so the
        integrators work with log t throughout.
        """
        log_t = np.asarray(log_t, dtype=float)
        if self.family == 'power':
            return np.exp(self.alpha * log_t)
        if self.family == 'log':
            return (1.0 - log_t) ** (-1.0 - self.beta)

        table = self._interp
        lo, hi = table['log_t'][0], table['log_t'][-1]
        v = table['values']
        below = v[0] * np.exp(table['slope'] * (log_t - lo))
        inside = table['pchip'](np.clip(log_t, lo, hi))
        out = np.where(log_t < lo, below, inside)
        return np.where(log_t > hi, v[-1], out)

    def values(self, t) -> np.ndarray:
        """
        Vectorized evaluation on (0, cap]

        Args:
            t: Scalar or array of arguments

        Returns:
            Array of omega(t)
        """
        t = np.asarray(t, dtype=float)
        if np.any(~(t > 0)) or np.any(t > self.cap * (1 + 1e-12)):
            raise DomainError(f"Modulus argument outside (0, {self.cap}]")
        return self.log_values(np.log(np.minimum(t, self.cap)))

    def capped(self, t) -> np.ndarray:
        """Evaluate omega(min(t, cap)); omega is continued as a constant above the cap"""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("Modulus argument must be non-negative")
        safe = np.where(t > 0, np.minimum(t, self.cap), self.cap)
        return np.where(t > 0, self.log_values(np.log(safe)), 0.0)

    def __call__(self, t: float) -> float:
        return evaluate(self, t)

    @classmethod
    def from_spec(cls, spec: Dict[str, Any]) -> 'Modulus':
        """
        Build a modulus from a config dictionary

        Args:
            spec: {"family": "power", "alpha": a} | {"family": "log", "beta": b}
                  | {"family": "tabulated", "knots": [[t, v], ...]}, optional "cap"

        Returns:
            Modulus instance
        """
        if not isinstance(spec, dict) or 'family' not in spec:
            raise ConfigError(f"Modulus spec must be a dictionary with a 'family' key: {spec!r}")
        family = spec['family']
        try:
            if family == 'power':
                return power_modulus(float(spec['alpha']), float(spec.get('cap', 1.0)))
            if family == 'log':
                return log_modulus(float(spec['beta']), float(spec.get('cap', 1.0)))
            if family == 'tabulated':
                cap = spec.get('cap')
                return tabulated_modulus(spec['knots'], None if cap is None else float(cap))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid {family} modulus spec {spec!r}: {e}") from e
        raise ConfigError(f"Unknown modulus family '{family}'")

    def to_spec(self) -> Dict[str, Any]:
        if self.family == 'power':
            return {'family': 'power', 'alpha': self.alpha, 'cap': self.cap}
        if self.family == 'log':
            return {'family': 'log', 'beta': self.beta, 'cap': self.cap}
        return {'family': 'tabulated', 'knots': [list(k) for k in self.knots], 'cap': self.cap}


@dataclass(frozen=True)
class RegularityReport:
    """Empirical certificate of the regularity conditions on the dyadic grid"""
    dini_value: float
    epsilon: float
    almost_dec_constant: float
    weak_constant: float
    is_regular: bool
    linear_quotient_constant: float
    depth: int = DYADIC_DEPTH


def power_modulus(alpha: float, cap: float = 1.0) -> Modulus:
    return Modulus('power', alpha=alpha, cap=cap)


def log_modulus(beta: float, cap: float = 1.0) -> Modulus:
    return Modulus('log', beta=beta, cap=cap)


def tabulated_modulus(knots: Sequence[Sequence[float]], cap: Optional[float] = None) -> Modulus:
    """
    Build a tabulated modulus from (t, value) pairs

    Args:
        knots: Strictly increasing t-values with non-decreasing values
        cap: Evaluation cap, defaults to the largest knot

    Returns:
        Modulus of the tabulated family
    """
    pairs = tuple((float(t), float(v)) for t, v in knots)
    if cap is None:
        cap = max(t for t, _ in pairs) if pairs else 1.0
    return Modulus('tabulated', knots=pairs, cap=cap)


def evaluate(m: Modulus, t: float) -> float:
    """
    Evaluate omega(t)

    Args:
        m: Modulus
        t: Argument in (0, cap]

    Returns:
        omega(t)
    """
    if not 0 < t <= m.cap:
        raise DomainError(f"Modulus argument {t} outside (0, {m.cap}]")
    return float(m.log_values(math.log(t)))


def _check_upper(m: Modulus, upper: float):
    if not 0 < upper <= m.cap * (1 + 1e-12):
        raise DomainError(f"Integration limit {upper} outside (0, {m.cap}]")


def _shell_integrals(m: Modulus, log_upper: float, count: int) -> np.ndarray:
    """
    Integrals of omega(t)/t over (2**-(k+1) u, 2**-k u], k = 0..count-1

    In the log-depth variable s = log(u/t) every shell has width ln 2 and the
    integrand is omega(u e**-s).
    """
    k = np.arange(count)[:, None]
    s = (k + 0.5 * (_GL_NODES[None, :] + 1.0)) * LN2
    vals = m.log_values(log_upper - s)
    return 0.5 * LN2 * (vals @ _GL_WEIGHTS)


def dini_diverges(m: Modulus) -> bool:
    """
    Divergence test of the Dini integral near 0

    Shells are counted from the cap, so the answer is a property of the
    modulus alone. Shells that neither decay geometrically nor faster than
    1/k declare divergence.
    """
    shells = _shell_integrals(m, math.log(m.cap), SHELL_COUNT)
    early, late = shells[19], shells[SHELL_COUNT - 1]
    if late <= 0:
        return False
    order = math.log2(early / late)
    ratio_early = shells[20] / shells[19]
    ratio_late = shells[SHELL_COUNT - 1] / shells[SHELL_COUNT - 2]
    geometric = ratio_late <= ratio_early * (1 + 1e-2)
    if order <= 1.0 and not geometric:
        logger.debug(f"Dini shells decay with order {order:.3f}, declaring divergence")
        return True
    return False


def dini_integral(m: Modulus, upper: Optional[float] = None) -> float:
    """
    Dini integral of omega(t)/t over (0, upper]

    Divergence is decided once by `dini_diverges`. Otherwise the first
    SHELL_COUNT dyadic shells below upper are integrated with the 16-point
    Gauss-Legendre rule and the remaining tail is handed to scipy's adaptive
    quadrature on the log-depth variable.

    Args:
        m: Modulus
        upper: Upper limit, defaults to the cap

    Returns:
        Integral value or math.inf
    """
    upper = m.cap if upper is None else float(upper)
    _check_upper(m, upper)
    if dini_diverges(m):
        return math.inf
    log_upper = math.log(min(upper, m.cap))

    shells = _shell_integrals(m, log_upper, SHELL_COUNT)
    s0 = SHELL_COUNT * LN2
    tail, err = integrate.quad(
        lambda s: float(m.log_values(log_upper - s)),
        s0, np.inf, epsabs=1e-14, epsrel=1e-10, limit=200
    )
    total = float(shells.sum()) + tail
    logger.debug(f"Dini integral up to {upper:.3g}: shells={shells.sum():.10g}, tail={tail:.3g} (+-{err:.1g})")
    return total


def weak_integral(m: Modulus, x: float, top: Optional[float] = None) -> float:
    """
    x * integral of omega(t)/t**2 over [x, top]

    With t = x e**s the integrand becomes omega(x e**s) e**-s on
    [0, log(top/x)], integrated shell-by-shell with Gauss-Legendre.
    """
    top = m.cap if top is None else float(top)
    if not 0 < x <= top:
        raise DomainError(f"Weak integral needs 0 < x <= top, got x={x}, top={top}")
    length = math.log(top / x)
    if length <= 0:
        return 0.0

    whole = int(length // LN2)
    edges = [k * LN2 for k in range(whole + 1)]
    if length - edges[-1] > 1e-14:
        edges.append(length)
    edges = np.array(edges)
    a, b = edges[:-1, None], edges[1:, None]
    s = a + 0.5 * (b - a) * (_GL_NODES[None, :] + 1.0)
    log_t = np.minimum(math.log(x) + s, math.log(m.cap))
    vals = m.log_values(log_t) * np.exp(-s)
    return float(np.sum(0.5 * (b - a)[:, 0] * (vals @ _GL_WEIGHTS)))


def _dyadic_grid(m: Modulus, depth: int) -> np.ndarray:
    return m.cap * 2.0 ** -np.arange(depth + 1)


def _max_quotient_ratio(t: np.ndarray, w: np.ndarray, exponent: float) -> float:
    # t is decreasing along the grid, so pairs j < k have t_j > t_k
    q = w / t ** exponent
    ratios = q[:, None] / q[None, :]
    upper = np.triu(ratios, k=1)
    return max(1.0, float(upper.max()))


def check_regular(m: Modulus, epsilon: float, depth: int = DYADIC_DEPTH) -> RegularityReport:
    """
    Certify the regularity conditions on a geometric dyadic grid

    Args:
        m: Modulus
        epsilon: Exponent of the almost-decreasing condition, in (0,1)
        depth: Grid depth, t = cap * 2**-j for j = 0..depth

    Returns:
        RegularityReport with empirical constants
    """
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0,1), got {epsilon}")

    t = _dyadic_grid(m, depth)
    w = m.values(t)
    almost_dec = _max_quotient_ratio(t, w, epsilon)
    linear = _max_quotient_ratio(t, w, 1.0)
    weak = max(weak_integral(m, float(x)) / float(wx) for x, wx in zip(t, w))
    dini = dini_integral(m)

    is_regular = math.isfinite(dini) and math.isfinite(almost_dec)
    logger.debug(
        f"Regularity of {m.family}: dini={dini:.6g}, C(eps={epsilon})={almost_dec:.6g}, "
        f"weak={weak:.6g}"
    )
    return RegularityReport(
        dini_value=dini,
        epsilon=epsilon,
        almost_dec_constant=almost_dec,
        weak_constant=weak,
        is_regular=is_regular,
        linear_quotient_constant=linear,
        depth=depth,
    )


def conjugate(m: Modulus) -> Modulus:
    """
    Conjugate modulus omega~(x) = int_0^x omega(t)/t dt + x int_x^T omega(t)/t^2 dt

    Tabulated on x = T * 2**-j, j = 0..DYADIC_DEPTH.

    Args:
        m: Dini-smooth modulus

    Returns:
        Tabulated Modulus
    """
    if not math.isfinite(dini_integral(m)):
        raise PreconditionError(f"Conjugate modulus needs a Dini-smooth modulus, {m.family} is not")

    xs = _dyadic_grid(m, DYADIC_DEPTH)[::-1]
    vals = np.array([dini_integral(m, float(x)) + weak_integral(m, float(x)) for x in xs])
    vals = np.maximum.accumulate(vals)
    logger.debug(f"Conjugate of {m.family} tabulated on {len(xs)} knots")
    return tabulated_modulus(list(zip(xs.tolist(), vals.tolist())), cap=m.cap)
