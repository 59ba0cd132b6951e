import math

import numpy as np
import pytest

from core.config import ExperimentConfig
from core.errors import PreconditionError, ResolutionError
from core.experiments import (EXTENSION_BOUND, STAR_EXTENSION_BOUND, proof_decomposition_check, random_squares,
                              run_bloch_experiment, run_decomposition_experiment, run_embedding_experiment,
                              run_experiment, run_extension_experiment, run_invariance_experiment,
                              run_kernel_bound_check, run_lift_experiment)
from core.function_family import FamilyMember, domain_box
from core.geometry import Square, disk_domain
from core.grid_function import sample_function
from core.report import relative_spread
from core.result_saver import save_ratio_report_csv

POWER = {'family': 'power', 'alpha': 0.5}
DISK = {'kind': 'disk', 'radius': 1.0}
STAR = {'kind': 'star', 'amplitude': 0.1, 'depth': 6, 'modulus': POWER}


def constant_family(box, n, constants):
    return [FamilyMember(f"constant-{i:03d}", 'constant', sample_function(lambda z, c=c: np.full(z.shape, c), box, n))
            for i, c in enumerate(constants)]


@pytest.fixture
def small_config():
    return ExperimentConfig(POWER, DISK, n=64, depth=3, family_size=4)


def test_invariance_constant_inputs_share_norm_ratio():
    cfg = ExperimentConfig(POWER, DISK, n=128, depth=4)
    box = domain_box(disk_domain(1.0))
    report = run_invariance_experiment(cfg, constant_family(box, 128, [1.0, 5.0]))
    assert all(r.verdict == 'zero-input' and math.isnan(r.ratio) for r in report.rows)
    assert sorted({r.depth for r in report.rows}) == [3, 4, 5]
    norms = report.details['norm_ratios']
    small, large = ([norms[t][j] for j in (3, 4, 5)] for t in ('constant-000', 'constant-001'))
    np.testing.assert_allclose(small, large, rtol=1e-9)
    assert all(math.isfinite(v) for v in small)
    assert report.verdicts['finite']


def test_invariance_rows_are_seminorm_ratios(small_config):
    report = run_invariance_experiment(small_config)
    for row in report.rows:
        if row.verdict != 'zero-input':
            assert row.ratio == pytest.approx(row.output_seminorm / row.input_seminorm)
    lacunary = [r for r in report.rows if r.test_id.startswith('lacunary')]
    assert lacunary and all(r.verdict == 'finite' for r in lacunary)
    norms = report.details['norm_ratios']
    assert set(norms) == {r.test_id for r in report.rows}


def test_invariance_ratio_is_scale_invariant(small_config):
    base = run_invariance_experiment(small_config)
    scaled = run_invariance_experiment(small_config.with_changes(amplitude=10.0))
    np.testing.assert_allclose([r.ratio for r in base.rows], [r.ratio for r in scaled.rows], rtol=1e-9)
    assert [r.test_id for r in base.rows] == [r.test_id for r in scaled.rows]


def test_invariance_is_deterministic(small_config, tmp_path):
    first = save_ratio_report_csv(run_invariance_experiment(small_config), tmp_path / 'a.csv')
    second = save_ratio_report_csv(run_invariance_experiment(small_config), tmp_path / 'b.csv')
    assert first.read_bytes() == second.read_bytes()


def test_invariance_needs_regular_modulus():
    knots = [[2.0 ** -k, 1.0 / (1.0 + k * math.log(2.0))] for k in range(60, -1, -1)]
    cfg = ExperimentConfig({'family': 'tabulated', 'knots': knots}, DISK, n=64, depth=3)
    with pytest.raises(PreconditionError):
        run_invariance_experiment(cfg)


def test_invariance_names_failing_member():
    cfg = ExperimentConfig(POWER, DISK, n=16, depth=3, family_size=1)
    with pytest.raises(ResolutionError, match=r'\[lacunary-000\]'):
        run_invariance_experiment(cfg)


def test_lift_of_zero_function(small_config):
    box = domain_box(disk_domain(1.0))
    report = run_lift_experiment(small_config, constant_family(box, 64, [0.0]))
    assert report.rows
    assert all(r.output_seminorm == 0.0 for r in report.rows)
    assert all(r.verdict == 'zero-input' for r in report.rows)


def test_lift_power_estimates_within_factor_six(small_config):
    report = run_lift_experiment(small_config.with_changes(family_size=2))
    assert report.verdicts['finite']
    for test_id in {r.test_id for r in report.rows}:
        omega = max(r.output_seminorm for r in report.rows
                    if r.test_id == test_id and r.experiment == 'lift-omega')
        conj = max(r.output_seminorm for r in report.rows
                   if r.test_id == test_id and r.experiment == 'lift-conjugate')
        assert 0.0 < conj <= omega * (1 + 1e-9)
        assert omega <= 6.0 * conj


def test_lift_runs_for_log_modulus():
    cfg = ExperimentConfig({'family': 'log', 'beta': 1.0}, DISK, n=64, depth=3, family_size=2)
    report = run_lift_experiment(cfg)
    assert report.rows
    assert report.verdicts['finite']
    assert {r.experiment for r in report.rows} == {'lift-omega', 'lift-conjugate'}
    assert report.details['conjugate_trend']


def test_embedding_of_identity():
    cfg = ExperimentConfig(POWER, DISK, n=128, depth=4)
    box = domain_box(disk_domain(1.0))
    member = FamilyMember('identity', 'polynomial', sample_function(lambda z: z, box, 128))
    report = run_embedding_experiment(cfg, [member])
    assert report.rows[0].ratio <= 10.0
    assert report.details['values']['identity']['sup'] < 1.0


def test_embedding_family_is_uniform():
    cfg = ExperimentConfig(POWER, DISK, n=128, depth=4, family_size=6)
    report = run_embedding_experiment(cfg)
    assert report.verdicts['uniform']
    assert len(report.rows) == 6


def test_decomposition_of_constant():
    cfg = ExperimentConfig(POWER, DISK, n=64, depth=3)
    box = domain_box(disk_domain(1.0))
    member = constant_family(box, 64, [2.5])[0]
    result = proof_decomposition_check(cfg, Square(0.25 + 0.25j, 0.5), member=member)
    assert result.extension_mean == pytest.approx(2.5)
    assert result.terms[1] == pytest.approx(0.0, abs=1e-10)
    assert result.terms[2] == pytest.approx(0.0, abs=1e-10)
    assert result.tail == pytest.approx(0.0, abs=1e-10)
    assert result.residue <= 1e-12


def test_decomposition_reconstructs_lacunary_input():
    cfg = ExperimentConfig(POWER, DISK, n=64, depth=3)
    result = proof_decomposition_check(cfg, Square(-0.25 + 0.0j, 0.5))
    assert result.residue <= 1e-12
    assert all(math.isfinite(t) for t in result.terms)
    assert result.test_id == 'lacunary-000'


def test_decomposition_square_checks():
    cfg = ExperimentConfig(POWER, DISK, n=64, depth=3)
    with pytest.raises(PreconditionError):
        proof_decomposition_check(cfg, Square(0.9 + 0.9j, 0.5))
    with pytest.raises(ResolutionError):
        proof_decomposition_check(cfg, Square(0j, 0.125))


def test_random_squares_stay_in_bounding_box(unit_disk):
    squares = random_squares(unit_disk, 50, np.random.default_rng(0))
    assert all(unit_disk.bounding_box.contains_square(q, tol=1e-12) for q in squares)
    assert {q.side for q in squares} <= {0.5, 0.25}


def test_decomposition_experiment():
    cfg = ExperimentConfig(POWER, DISK, n=64, depth=3)
    report = run_decomposition_experiment(cfg, count=6)
    assert len(report.rows) == 24
    assert report.verdicts['reconstruction']
    assert report.verdicts['uniform']


def test_kernel_bound_check():
    report = run_kernel_bound_check(count=2000, seed=1)
    assert report.verdicts['no_violations']
    assert report.rows[0].output_seminorm == 0.0


def test_run_experiment_dispatch(small_config):
    assert run_experiment('kernel', small_config).experiment == 'kernel'
    with pytest.raises(PreconditionError):
        run_experiment('unknown', small_config)


@pytest.mark.slow
@pytest.mark.parametrize('domain', [DISK, STAR])
def test_invariance_finite_on_mixed_family(domain):
    cfg = ExperimentConfig(POWER, domain, n=128, depth=4, family_size=8)
    report = run_invariance_experiment(cfg)
    assert report.verdicts['finite']
    assert math.isfinite(report.max_ratio)
    assert len(report.details['argmax_squares']) == 8


def norm_maxima(report, depths):
    norms = report.details['norm_ratios'].values()
    return [max(v[j] for v in norms) for j in depths]


@pytest.mark.slow
@pytest.mark.parametrize('domain', [DISK, STAR])
def test_invariance_stable_across_depths_and_resolution(domain):
    fine = run_invariance_experiment(ExperimentConfig(POWER, domain, n=256, depth=5, family_size=10))
    assert all(r.verdict == 'finite' for r in fine.rows)
    assert fine.verdicts['finite'] and fine.verdicts['norm_bounded']

    coarse = run_invariance_experiment(ExperimentConfig(POWER, domain, n=128, depth=4, family_size=10))
    fine_at_coarse_depths = run_invariance_experiment(ExperimentConfig(POWER, domain, n=256, depth=4,
                                                                       family_size=10))
    for a, b in zip(norm_maxima(coarse, (3, 4, 5)), norm_maxima(fine_at_coarse_depths, (3, 4, 5))):
        assert relative_spread([a, b]) <= 0.3


@pytest.mark.slow
def test_bloch_experiment_rows():
    cfg = ExperimentConfig(POWER, DISK, n=128, depth=4)
    report = run_bloch_experiment(cfg)
    assert [r.depth for r in report.rows] == [7, 7, 8, 8]
    assert all(r.input_seminorm == 1.0 for r in report.rows)
    assert all(math.isfinite(r.output_seminorm) and r.output_seminorm > 0 for r in report.rows)
    assert report.details['collar'] == (4.0 * 4.0 / 128, 0.25)
    assert set(report.verdicts) == {'stable_interior', 'stable_exterior'}


@pytest.mark.slow
def test_bloch_disk_suprema_at_256():
    report = run_bloch_experiment(ExperimentConfig(POWER, DISK, n=256))
    suprema = report.details['suprema']
    # staircase boundary of the sampled indicator keeps the interior level near 0.5
    assert all(0.0 < v <= 0.6 for v in suprema['interior'])
    assert all(v <= 1.0 for v in suprema['exterior'])
    assert report.verdicts['stable_interior'] and report.verdicts['stable_exterior']


@pytest.mark.slow
def test_bloch_stable_on_log_star():
    log = {'family': 'log', 'beta': 1.0}
    star = {'kind': 'star', 'amplitude': 0.1, 'depth': 6, 'modulus': log}
    report = run_bloch_experiment(ExperimentConfig(log, star, n=256))
    assert all(math.isfinite(r.output_seminorm) for r in report.rows)
    assert report.verdicts['stable_interior'] and report.verdicts['stable_exterior']


@pytest.mark.slow
def test_extension_ratio_bounded():
    cfg = ExperimentConfig(POWER, DISK, n=128, depth=4, family_size=4)
    report = run_extension_experiment(cfg)
    assert report.max_ratio <= EXTENSION_BOUND
    assert report.verdicts['bounded']


@pytest.mark.slow
def test_star_extension_ratio_bounded():
    star = {'kind': 'star', 'amplitude': 0.1, 'depth': 4, 'modulus': POWER}
    report = run_extension_experiment(ExperimentConfig(POWER, star, n=128, depth=4, family_size=4))
    assert report.max_ratio <= STAR_EXTENSION_BOUND
    assert report.verdicts['bounded']
    assert math.isfinite(report.details['bilipschitz_constant'])
