"""
Core modules of the restricted Beurling transform toolkit
"""
from .errors import (BeurlingToolkitError, DomainError, PreconditionError, AmplitudeError, ConfigError,
                     ResolutionError, GeometryError, NumericalError)
from .moduli import (Modulus, RegularityReport, power_modulus, log_modulus, tabulated_modulus, evaluate,
                     dini_integral, dini_diverges, weak_integral, check_regular, conjugate)
from .geometry import (Square, PlanarDomain, disk_domain, star_domain, contains, boundary_distance,
                       normal_modulus_constant, make_test_domain, domain_area)
from .grid_function import GridFunction, sample_function, load_grid_csv, save_grid_csv, save_grid_geotiff
from .transform import (beurling_spectral, beurling_spectral_padded, beurling_direct, beurling_direct_many,
                        restricted_beurling, kernel_difference_violations)
from .seminorms import (SeminormEstimate, square_mean, domain_mean, mean_oscillation, campanato_seminorm,
                        lipschitz_seminorm, bloch_seminorm, mean_gap, sup_norm)
from .extension import (disk_reflect_extend, collar_reflect_extend, collar_map,
                        reflection_bilipschitz_constant)
from .config import ExperimentConfig, domain_from_spec, load_experiment_config
from .report import RatioReport, RatioRow
from .experiments import (EXPERIMENTS, DecompositionReport, run_invariance_experiment, run_lift_experiment,
                          run_bloch_experiment, run_embedding_experiment, run_extension_experiment,
                          proof_decomposition_check, run_decomposition_experiment, run_kernel_bound_check,
                          run_experiment)
from .result_saver import save_experiment_results, save_ratio_report_csv, save_seminorm_csv
from .validation import validate_all_inputs, validate_grid_for_domain

__all__ = [
    'BeurlingToolkitError', 'DomainError', 'PreconditionError', 'AmplitudeError', 'ConfigError',
    'ResolutionError', 'GeometryError', 'NumericalError',
    'Modulus', 'RegularityReport', 'power_modulus', 'log_modulus', 'tabulated_modulus', 'evaluate',
    'dini_integral', 'dini_diverges', 'weak_integral', 'check_regular', 'conjugate',
    'Square', 'PlanarDomain', 'disk_domain', 'star_domain', 'contains', 'boundary_distance',
    'normal_modulus_constant', 'make_test_domain', 'domain_area',
    'GridFunction', 'sample_function', 'load_grid_csv', 'save_grid_csv', 'save_grid_geotiff',
    'beurling_spectral', 'beurling_spectral_padded', 'beurling_direct', 'beurling_direct_many',
    'restricted_beurling', 'kernel_difference_violations',
    'SeminormEstimate', 'square_mean', 'domain_mean', 'mean_oscillation', 'campanato_seminorm',
    'lipschitz_seminorm', 'bloch_seminorm', 'mean_gap', 'sup_norm',
    'disk_reflect_extend', 'collar_reflect_extend', 'collar_map', 'reflection_bilipschitz_constant',
    'ExperimentConfig', 'domain_from_spec', 'load_experiment_config',
    'RatioReport', 'RatioRow',
    'EXPERIMENTS', 'DecompositionReport', 'run_invariance_experiment', 'run_lift_experiment',
    'run_bloch_experiment', 'run_embedding_experiment', 'run_extension_experiment',
    'proof_decomposition_check', 'run_decomposition_experiment', 'run_kernel_bound_check', 'run_experiment',
    'save_experiment_results', 'save_ratio_report_csv', 'save_seminorm_csv',
    'validate_all_inputs', 'validate_grid_for_domain',
]
