"""
Experiment runners: each boundedness statement checked on a test family

Runners follow one loop: build the family, process every member inside
try/except (an error aborts the run naming the member), combine input and
output statistics into report rows, then derive verdict flags.
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.logger_config import log_duration, logger
from .config import ExperimentConfig
from .errors import BeurlingToolkitError, PreconditionError, ResolutionError
from .extension import collar_reflect_extend, disk_reflect_extend, reflection_bilipschitz_constant
from .function_family import (FamilyMember, domain_box, generate_family, holomorphic_family,
                              lacunary_series, masked, resolved_depth)
from .geometry import PlanarDomain, Square, boundary_distance, contains
from .grid_function import GridFunction, sample_function
from .moduli import Modulus, check_regular, conjugate, dini_integral
from .report import RatioReport, RatioRow, build_report, combine_ratio, is_stable, validate_rows
from .seminorms import (MIN_CELLS_PER_SQUARE, bloch_seminorm, campanato_seminorm, lipschitz_seminorm,
                        mean_oscillation, square_mean, sup_norm)
from .transform import beurling_spectral, kernel_difference_violations, restricted_beurling

EXPERIMENTS = ('invariance', 'lift', 'bloch', 'embedding', 'extension', 'decomposition', 'kernel')

# Bloch collar in boundary distance
BLOCH_COLLAR = (2.0 ** -7, 2.0 ** -2)
# Collar suprema at or below this level count as vanishing
BLOCH_VANISHING = 0.1
LIFT_BAND_RANGE = (2.0 ** -7, 2.0 ** -3)
LIFT_STABILITY = 0.5
LIFT_MAX_POINTS = 2000
EMBEDDING_BOUND = 50.0
EXTENSION_BOUND = 20.0
STAR_EXTENSION_BOUND = 30.0
DECOMPOSITION_BOUND = 100.0
DECOMPOSITION_SQUARES = 20
RECONSTRUCTION_TOLERANCE = 1e-12


def _guarded(test_id: str, step: Callable):
    """Run one member's pipeline; toolkit errors are re-raised naming the member"""
    try:
        return step()
    except BeurlingToolkitError as e:
        logger.error(f"Test function {test_id} failed: {e}")
        raise type(e)(f"[{test_id}] {e}") from e


def _extend(d: PlanarDomain, f: GridFunction, box: Square) -> GridFunction:
    if d.kind == 'disk' and d.radius == 1.0:
        return disk_reflect_extend(f, box)
    return collar_reflect_extend(d, f, box)


def _lacunary_members(m: Modulus, box: Square, n: int, size: int, seed: int,
                      amplitude: float) -> List[FamilyMember]:
    rng = np.random.default_rng(seed)
    depth = resolved_depth(box.side / n)
    members = []
    for idx in range(size):
        fn = lacunary_series(m, depth, direction=rng.uniform(0, np.pi),
                             phases=rng.uniform(0, 2 * np.pi, depth), amplitude=amplitude)
        members.append(FamilyMember(f"lacunary-{idx:03d}", 'lacunary', sample_function(fn, box, n)))
    return members


def run_invariance_experiment(cfg: ExperimentConfig,
                              family: Optional[Sequence[FamilyMember]] = None) -> RatioReport:
    """
    Campanato seminorm of B_Omega f against that of f at depths J-1, J, J+1

    Rows carry the pure seminorm ratio. The norm ratio (seminorm + sup over
    Omega, finite for constants) goes to details['norm_ratios'].

    Args:
        cfg: Experiment config
        family: Optional explicit family (default: generated mixed family)

    Returns:
        RatioReport with verdicts 'finite', 'bounded' and 'norm_bounded'
    """
    m, d = cfg.parsed_modulus(), cfg.parsed_domain()
    regularity = check_regular(m, cfg.epsilon)
    if not regularity.is_regular:
        raise PreconditionError(f"Modulus {m.to_spec()} is not regular for epsilon={cfg.epsilon}")

    box = domain_box(d, cfg.box_side)
    if family is None:
        family = generate_family(d, m, box, cfg.n, cfg.family_size, cfg.seed, cfg.amplitude)
    depths = (cfg.depth - 1, cfg.depth, cfg.depth + 1)
    logger.info(f"Invariance experiment: {len(family)} functions, n={cfg.n}, depths {depths}")

    rows: List[RatioRow] = []
    norm_ratios: Dict[str, Dict[int, float]] = {}
    argmax: List[Tuple[str, Square]] = []
    for i, member in enumerate(family, 1):
        logger.info(f"Processing {i}/{len(family)}: {member.test_id}")

        def step(member=member):
            f_in = masked(member, d)
            f_out = restricted_beurling(d, member.grid, 'spectral', cfg.pad_factor)
            est_in = campanato_seminorm(f_in, m, 1, d, depths[-1], cfg.shifts)
            est_out = campanato_seminorm(f_out, m, 1, d, depths[-1], cfg.shifts)
            return est_in, est_out, sup_norm(f_in, d), sup_norm(f_out, d)

        est_in, est_out, sup_in, sup_out = _guarded(member.test_id, step)
        norm_ratios[member.test_id] = {}
        for j in depths:
            min_scale = box.side * 2.0 ** -j
            semi_in = est_in.restricted_to(min_scale).value
            semi_out = est_out.restricted_to(min_scale).value
            rows.append(combine_ratio('invariance', member.test_id, j, semi_in, semi_out))
            norm_ratios[member.test_id][j] = combine_ratio(
                'invariance', member.test_id, j, semi_in + sup_in, semi_out + sup_out).ratio
        if est_out.argmax_square is not None:
            argmax.append((member.test_id, est_out.argmax_square))

    maxima = [_finite_max(r.ratio for r in rows if r.depth == j) for j in depths]
    norm_maxima = [_finite_max(v[j] for v in norm_ratios.values()) for j in depths]
    verdicts = {
        'finite': all(math.isfinite(r.ratio) for r in rows if r.verdict != 'zero-input'),
        'bounded': is_stable(maxima),
        'norm_bounded': is_stable(norm_maxima),
    }
    return build_report('invariance', rows, verdicts,
                        {'argmax_squares': argmax, 'norm_ratios': norm_ratios,
                         'almost_dec_constant': regularity.almost_dec_constant})


def _finite_max(values) -> float:
    finite = [v for v in values if math.isfinite(v)]
    return max(finite) if finite else math.nan


def _boundary_sample(d: PlanarDomain, f: GridFunction, radius: float,
                     rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Interior cells with rho < 2^-2 inside one boundary window, at most LIFT_MAX_POINTS"""
    z = f.centers()
    inside = contains(d, z)
    anchor = complex(d.boundary_point(rng.uniform(0, 2 * np.pi)))
    near = inside & (np.abs(z - anchor) <= radius)
    idx = np.flatnonzero(near.ravel())
    idx = idx[boundary_distance(d, z.ravel()[idx]) < BLOCH_COLLAR[1]]
    if idx.size > LIFT_MAX_POINTS:
        idx = np.sort(rng.choice(idx, LIFT_MAX_POINTS, replace=False))
    if idx.size < 2:
        raise ResolutionError("Too few boundary-adjacent cells for pair sampling")
    return idx, z.ravel()[idx]


def run_lift_experiment(cfg: ExperimentConfig,
                        family: Optional[Sequence[FamilyMember]] = None) -> RatioReport:
    """
    Lipschitz estimates of B_Omega f against omega and its conjugate

    Pairs are boundary-adjacent interior cells in a window of diameter at most
    the modulus cap. Rows are grouped per dyadic pair-distance band.

    Args:
        cfg: Experiment config (Dini-smooth modulus)
        family: Optional explicit family (default: lacunary series)

    Returns:
        RatioReport with rows 'lift-omega' and 'lift-conjugate'
    """
    m, d = cfg.parsed_modulus(), cfg.parsed_domain()
    if not math.isfinite(dini_integral(m)):
        raise PreconditionError(f"Modulus {m.to_spec()} is not Dini-smooth")
    m_tilde = conjugate(m)

    box = domain_box(d, cfg.box_side)
    if family is None:
        family = _lacunary_members(m, box, cfg.n, cfg.family_size, cfg.seed, cfg.amplitude)
    rng = np.random.default_rng(cfg.seed)
    radius = 0.5 * min(m.cap, m_tilde.cap) * (1 - 1e-9)
    logger.info(f"Lift experiment: {len(family)} functions, window radius {radius:.4g}")

    rows: List[RatioRow] = []
    trend: Dict[str, Dict[float, float]] = {}
    for i, member in enumerate(family, 1):
        logger.info(f"Processing {i}/{len(family)}: {member.test_id}")

        def step(member=member):
            f_out = restricted_beurling(d, member.grid, 'spectral', cfg.pad_factor)
            idx, pts = _boundary_sample(d, member.grid, radius, rng)
            vin, vout = member.grid.values.ravel()[idx], f_out.values.ravel()[idx]
            return {
                'lift-omega': (lipschitz_seminorm(pts, vin, m, seed=cfg.seed),
                               lipschitz_seminorm(pts, vout, m, seed=cfg.seed)),
                'lift-conjugate': (lipschitz_seminorm(pts, vin, m_tilde, seed=cfg.seed),
                                   lipschitz_seminorm(pts, vout, m_tilde, seed=cfg.seed)),
            }

        estimates = _guarded(member.test_id, step)
        for name, (est_in, est_out) in estimates.items():
            in_bands = {s.scale: s.value for s in est_in.per_scale}
            cap = m.cap if name == 'lift-omega' else m_tilde.cap
            for s in est_out.per_scale:
                band = int(round(math.log2(cap / s.scale)))
                rows.append(combine_ratio(name, member.test_id, band, in_bands.get(s.scale, 0.0), s.value))
                trend.setdefault(name, {})
                trend[name][s.scale] = max(trend[name].get(s.scale, 0.0), s.value)

    lo, hi = LIFT_BAND_RANGE
    conj_band = [v for s, v in trend.get('lift-conjugate', {}).items() if lo <= s <= hi]
    verdicts = {
        'finite': all(math.isfinite(r.output_seminorm) for r in rows),
        'conjugate_stable': is_stable(conj_band, LIFT_STABILITY),
    }
    details = {'omega_trend': sorted(trend.get('lift-omega', {}).items(), reverse=True),
               'conjugate_trend': sorted(trend.get('lift-conjugate', {}).items(), reverse=True)}
    return build_report('lift', rows, verdicts, details)


def _settled(values: Sequence[float], tolerance: float = 0.3) -> bool:
    return max(values) <= BLOCH_VANISHING or is_stable(values, tolerance)


def run_bloch_experiment(cfg: ExperimentConfig) -> RatioReport:
    """
    Weighted Bloch suprema of B chi_Omega on both boundary collars at n and 2n

    The collar lower end is clamped to the stencil limit 4h of the coarser grid.

    Args:
        cfg: Experiment config, domain built with the same modulus

    Returns:
        RatioReport with one row per side and resolution (input = sup |chi| = 1)
    """
    m, d = cfg.parsed_modulus(), cfg.parsed_domain()
    box = domain_box(d, cfg.box_side)
    resolutions = (cfg.n, 2 * cfg.n)
    rho_min = max(BLOCH_COLLAR[0], 4.0 * box.side / cfg.n)
    if rho_min > BLOCH_COLLAR[0]:
        logger.warning(f"Bloch collar lower end clamped from {BLOCH_COLLAR[0]:.4g} to 4h = {rho_min:.4g}")
    collar = (rho_min, BLOCH_COLLAR[1])

    rows: List[RatioRow] = []
    suprema: Dict[str, List[float]] = {'interior': [], 'exterior': []}
    for i, n in enumerate(resolutions, 1):
        test_id = f"chi-n{n}"
        logger.info(f"Processing {i}/{len(resolutions)}: {test_id}")

        def step(n=n):
            chi = sample_function(lambda z: contains(d, z).astype(float), box, n)
            out = beurling_spectral(chi, cfg.pad_factor)
            return chi, {side: bloch_seminorm(out, d, m, collar, side) for side in suprema}

        chi, estimates = _guarded(test_id, step)
        for side, est in estimates.items():
            suprema[side].append(est.value)
            rows.append(combine_ratio(f"bloch-{side}", test_id, int(math.log2(n)), sup_norm(chi), est.value))

    verdicts = {f"stable_{side}": _settled(values) for side, values in suprema.items()}
    return build_report('bloch', rows, verdicts, {'collar': collar, 'suprema': suprema})


def run_embedding_experiment(cfg: ExperimentConfig,
                             family: Optional[Sequence[FamilyMember]] = None) -> RatioReport:
    """
    Campanato value K against Bloch value V and sup S of holomorphic functions

    Args:
        cfg: Experiment config
        family: Optional explicit family (default: holomorphic family)

    Returns:
        RatioReport with input V+S, output K and verdict 'uniform' (K/(V+S) <= 50)
    """
    m, d = cfg.parsed_modulus(), cfg.parsed_domain()
    box = domain_box(d, cfg.box_side)
    if family is None:
        family = holomorphic_family(d, box, cfg.n, cfg.family_size, cfg.seed, cfg.amplitude)
    h = box.side / cfg.n
    collar = (4.0 * h, 0.9 * d.r_min)
    logger.info(f"Embedding experiment: {len(family)} functions, collar {collar}")

    rows: List[RatioRow] = []
    values: Dict[str, Dict[str, float]] = {}
    for i, member in enumerate(family, 1):
        logger.info(f"Processing {i}/{len(family)}: {member.test_id}")

        def step(member=member):
            bloch = bloch_seminorm(member.grid, d, m, collar, 'interior').value
            camp = campanato_seminorm(member.grid, m, 1, d, cfg.depth, cfg.shifts).value
            return bloch, sup_norm(member.grid, d), camp

        bloch, sup, camp = _guarded(member.test_id, step)
        values[member.test_id] = {'bloch': bloch, 'sup': sup, 'campanato': camp}
        rows.append(combine_ratio('embedding', member.test_id, cfg.depth, bloch + sup, camp))

    verdicts = {'uniform': all(not r.ratio > EMBEDDING_BOUND for r in rows)}
    return build_report('embedding', rows, verdicts, {'values': values})


def run_extension_experiment(cfg: ExperimentConfig,
                             family: Optional[Sequence[FamilyMember]] = None) -> RatioReport:
    """
    Whole-plane Campanato value of the reflected extension against the domain value

    Args:
        cfg: Experiment config
        family: Optional explicit family (default: lacunary series)

    Returns:
        RatioReport with verdict 'bounded' (ratio <= 20 on the disk, 30 on star domains)
    """
    m, d = cfg.parsed_modulus(), cfg.parsed_domain()
    box = domain_box(d, cfg.box_side)
    if family is None:
        family = _lacunary_members(m, box, cfg.n, cfg.family_size, cfg.seed, cfg.amplitude)
    logger.info(f"Extension experiment: {len(family)} functions")

    rows: List[RatioRow] = []
    for i, member in enumerate(family, 1):
        logger.info(f"Processing {i}/{len(family)}: {member.test_id}")

        def step(member=member):
            extended = _extend(d, member.grid, box)
            inner = campanato_seminorm(member.grid, m, 1, d, cfg.depth, cfg.shifts).value
            whole = campanato_seminorm(extended, m, 1, None, cfg.depth, cfg.shifts).value
            return inner, whole

        inner, whole = _guarded(member.test_id, step)
        rows.append(combine_ratio('extension', member.test_id, cfg.depth, inner, whole))

    bound = EXTENSION_BOUND if d.kind == 'disk' else STAR_EXTENSION_BOUND
    verdicts = {'bounded': all(not r.ratio > bound for r in rows)}
    details = {}
    if d.kind != 'disk':
        details['bilipschitz_constant'] = reflection_bilipschitz_constant(d)
    return build_report('extension', rows, verdicts, details)


@dataclass(frozen=True)
class DecompositionReport:
    """Localized terms of f = f1 + f2 + f3 on one square"""
    test_id: str
    square: Square
    extension_mean: complex
    residue: float
    terms: Tuple[float, float, float]
    raw_terms: Tuple[float, float, float]
    tail: float


def _ring_tail(d: PlanarDomain, extended: GridFunction, Q: Square, mean: complex) -> float:
    """Sum over rings Omega n (2^{k+1}Q minus 2^kQ) of l (2^k l)^-3 int |f~ - f~_Q|"""
    z = extended.centers()
    weight = np.where(contains(d, z), np.abs(extended.values - mean), 0.0) * extended.h ** 2
    ell = Q.side
    total, k = 0.0, 0
    while True:
        inner, outer = Q.dilate(2.0 ** k), Q.dilate(2.0 ** (k + 1))
        ring = outer.contains_points(z) & ~inner.contains_points(z)
        total += ell * (2.0 ** k * ell) ** -3 * float(weight[ring].sum())
        if outer.contains_square(d.bounding_box):
            return total
        k += 1


def proof_decomposition_check(cfg: ExperimentConfig, Q: Square, test_id: Optional[str] = None,
                              member: Optional[FamilyMember] = None) -> DecompositionReport:
    """
    Split f = f1 + f2 + f3 around Q and measure each transformed piece on Q

    f1 = f~_Q chi_Omega, f2 = (f - f~_Q) chi_{2Q n Omega}, f3 = (f - f~_Q) chi_{Omega minus 2Q},
    with f~ the reflected extension of f.

    Args:
        cfg: Experiment config
        Q: Square inside the domain's bounding box
        test_id: Identifier used in logs and the report
        member: Test function (default: first lacunary member of cfg's seed)

    Returns:
        DecompositionReport; terms are normalized by omega(l(Q))
    """
    m, d = cfg.parsed_modulus(), cfg.parsed_domain()
    box = domain_box(d, cfg.box_side)
    if member is None:
        member = _lacunary_members(m, box, cfg.n, 1, cfg.seed, cfg.amplitude)[0]
    test_id = test_id or member.test_id
    if not d.bounding_box.contains_square(Q):
        raise PreconditionError(f"Square {Q} is not within the domain's bounding box")

    f = member.grid
    xs, ys = f.axes()
    cells = int(np.sum((xs >= Q.xmin) & (xs < Q.xmax))) * int(np.sum((ys >= Q.ymin) & (ys < Q.ymax)))
    if cells < MIN_CELLS_PER_SQUARE:
        raise ResolutionError(f"Square {Q} holds {cells} cells, need {MIN_CELLS_PER_SQUARE}")

    def step():
        extended = _extend(d, f, box)
        mean = square_mean(extended, Q)
        z = f.centers()
        mask = contains(d, z)
        near = Q.dilate(2.0).contains_points(z)
        pieces = (
            np.where(mask, mean, 0.0),
            np.where(mask & near, f.values - mean, 0.0),
            np.where(mask & ~near, f.values - mean, 0.0),
        )
        residue = float(np.max(np.abs(f.values - sum(pieces))[mask], initial=0.0))
        raw = tuple(
            mean_oscillation(restricted_beurling(d, f.with_values(p), 'spectral', cfg.pad_factor), Q, d)
            for p in pieces
        )
        return extended, mean, residue, raw

    extended, mean, residue, raw = _guarded(test_id, step)
    scale = float(m.capped(Q.side))
    report = DecompositionReport(
        test_id, Q, mean, residue,
        tuple(r / scale for r in raw), raw,
        _ring_tail(d, extended, Q, mean) / scale,
    )
    logger.debug(f"Decomposition {test_id}: residue {residue:.3g}, terms {report.terms}, tail {report.tail:.4g}")
    return report


def random_squares(d: PlanarDomain, count: int, rng: np.random.Generator,
                   levels: Sequence[int] = (2, 3)) -> List[Square]:
    """Squares of side bbox * 2^-u, u in levels, placed uniformly inside the bounding box"""
    bbox = d.bounding_box
    squares = []
    for _ in range(count):
        side = bbox.side * 2.0 ** -int(rng.choice(levels))
        slack = 0.5 * (bbox.side - side)
        offset = complex(*rng.uniform(-slack, slack, 2))
        squares.append(Square(bbox.center + offset, side))
    return squares


def run_decomposition_experiment(cfg: ExperimentConfig, count: int = DECOMPOSITION_SQUARES) -> RatioReport:
    """
    proof_decomposition_check over random squares for one lacunary function

    Rows 'decomposition-f1/f2/f3' and 'decomposition-tail' carry omega(l) as
    input and the localized quantity as output.
    """
    m, d = cfg.parsed_modulus(), cfg.parsed_domain()
    box = domain_box(d, cfg.box_side)
    member = _lacunary_members(m, box, cfg.n, 1, cfg.seed, cfg.amplitude)[0]
    squares = random_squares(d, count, np.random.default_rng(cfg.seed))

    rows: List[RatioRow] = []
    residues = []
    for i, Q in enumerate(squares, 1):
        test_id = f"{member.test_id}-Q{i:02d}"
        logger.info(f"Processing {i}/{len(squares)}: {test_id}")
        result = proof_decomposition_check(cfg, Q, test_id, member)
        residues.append(result.residue)
        scale = float(m.capped(Q.side))
        depth = int(round(math.log2(box.side / Q.side)))
        for j, raw in enumerate(result.raw_terms, 1):
            rows.append(combine_ratio(f"decomposition-f{j}", test_id, depth, scale, raw))
        rows.append(combine_ratio('decomposition-tail', test_id, depth, scale, result.tail * scale))

    verdicts = {
        'reconstruction': max(residues) <= RECONSTRUCTION_TOLERANCE,
        'uniform': all(not r.ratio > DECOMPOSITION_BOUND for r in rows),
    }
    return build_report('decomposition', rows, verdicts, {'max_residue': max(residues)})


def run_kernel_bound_check(count: int = 10_000, seed: int = 0, constant: float = 12.0) -> RatioReport:
    """Random-triple check of the kernel difference bound, one report row"""
    violations = kernel_difference_violations(count, seed, constant)
    row = combine_ratio('kernel', f"triples-{seed}", 0, float(count), float(violations))
    return build_report('kernel', [row], {'no_violations': violations == 0}, {'constant': constant})


def run_experiment(name: str, cfg: ExperimentConfig) -> RatioReport:
    """
    Dispatch one named experiment and validate its rows

    Args:
        name: One of EXPERIMENTS
        cfg: Experiment config

    Returns:
        RatioReport
    """
    runners = {
        'invariance': run_invariance_experiment,
        'lift': run_lift_experiment,
        'bloch': run_bloch_experiment,
        'embedding': run_embedding_experiment,
        'extension': run_extension_experiment,
        'decomposition': run_decomposition_experiment,
        'kernel': lambda c: run_kernel_bound_check(seed=c.seed),
    }
    if name not in runners:
        raise PreconditionError(f"Unknown experiment '{name}', expected one of {EXPERIMENTS}")

    logger.info(f"Starting {name} experiment")
    with log_duration(f"{name} experiment"):
        report = runners[name](cfg)
    if not validate_rows(list(report.rows), name):
        raise PreconditionError(f"{name} experiment produced an invalid report")
    logger.info(f"{name} experiment completed: {len(report.rows)} rows")
    return report
