"""
CLI interface for the restricted Beurling transform toolkit
"""
import argparse
import json
import logging
import sys
from dataclasses import asdict
from typing import Any, Dict, List, Optional

import numpy as np

from utils.logger_config import setup_logger, logger, LOGGER_NAME
from core import (
    EXPERIMENTS, BeurlingToolkitError, ConfigError, ExperimentConfig, Modulus, Square, beurling_direct_many,
    beurling_spectral, bloch_seminorm, campanato_seminorm, check_regular, collar_reflect_extend,
    disk_reflect_extend, domain_from_spec, load_experiment_config, load_grid_csv, restricted_beurling,
    run_experiment, save_experiment_results, save_grid_csv, save_grid_geotiff, save_seminorm_csv,
    validate_all_inputs, validate_grid_for_domain,
)

USAGE_EXIT_CODE = 64


class UsageArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with USAGE_EXIT_CODE"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT_CODE, f"{self.prog}: error: {message}\n")


def create_argument_parser():
    """
    Create and configure argument parser for CLI
    """
    parser = UsageArgumentParser(
        description='Restricted Beurling transform toolkit - moduli, seminorms and boundedness experiments',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py check-modulus --family power --alpha 0.5 --epsilon 0.75
  python main.py transform -i f.csv -o bf.csv --method spectral --domain '{"kind": "disk"}'
  python main.py experiment invariance --config invariance.json --verbose
        """
    )
    parser.add_argument(
        '-v', '--verbose',
        action='store_true',
        help='Enable verbose logging'
    )
    parser.add_argument(
        '--version',
        action='version',
        version='Beurling Campanato CLI v1.0.0'
    )

    commands = parser.add_subparsers(dest='command', required=True, parser_class=UsageArgumentParser)

    check = commands.add_parser('check-modulus', help='Certify regularity of a modulus of continuity')
    check.add_argument('--family', required=True, choices=['power', 'log', 'tabulated'])
    check.add_argument('--alpha', type=float, help='Exponent of the power family')
    check.add_argument('--beta', type=float, help='Exponent of the log family')
    check.add_argument('--knots', help='JSON list of [t, value] knots for the tabulated family')
    check.add_argument('--cap', type=float, help='Upper end T of the domain (default 1)')
    check.add_argument('--epsilon', type=float, default=0.9, help='Almost-decreasing exponent (default: 0.9)')

    transform = commands.add_parser('transform', help='Apply the (restricted) Beurling transform to a grid')
    transform.add_argument('-i', '--input', required=True, help='Grid function CSV')
    transform.add_argument('-o', '--output', required=True, help='Output grid CSV')
    transform.add_argument('--method', choices=['spectral', 'direct'], default='spectral')
    transform.add_argument('--pad-factor', type=int, default=4)
    transform.add_argument('--domain', help='JSON domain spec; restricts the transform to the domain')
    transform.add_argument('--local-correction', action='store_true',
                           help='Second-order correction of the direct quadrature')
    transform.add_argument('--geotiff', help='Also write the output as a two-band GeoTIFF')

    seminorm = commands.add_parser('seminorm', help='Estimate a Campanato or weighted Bloch seminorm')
    seminorm.add_argument('-i', '--input', required=True, help='Grid function CSV')
    seminorm.add_argument('--kind', choices=['campanato', 'bloch'], default='campanato')
    seminorm.add_argument('--modulus', required=True, help='JSON modulus spec')
    seminorm.add_argument('--domain', help='JSON domain spec (required for bloch)')
    seminorm.add_argument('-p', type=int, choices=[1, 2], default=1)
    seminorm.add_argument('--depth', type=int, default=5)
    seminorm.add_argument('--shifts', type=int, default=4)
    seminorm.add_argument('--centering', choices=['mean', 'median'], default='mean')
    seminorm.add_argument('--collar', type=float, nargs=2, metavar=('RHO_MIN', 'RHO_MAX'))
    seminorm.add_argument('--side', choices=['interior', 'exterior', 'both'], default='interior')
    seminorm.add_argument('-o', '--output', help='Per-scale profile CSV')

    extend = commands.add_parser('extend', help='Extend a grid function from a domain by reflection')
    extend.add_argument('-i', '--input', required=True, help='Grid function CSV')
    extend.add_argument('-o', '--output', required=True, help='Output grid CSV')
    extend.add_argument('--domain', required=True, help='JSON domain spec')
    extend.add_argument('--target-side', type=float, help='Side of the target box (default: input box side)')
    extend.add_argument('-n', type=int, help='Cells per side of the result (default: input n)')

    experiment = commands.add_parser('experiment', help='Run a boundedness experiment and write a ratio CSV')
    experiment.add_argument('name', choices=EXPERIMENTS)
    experiment.add_argument('-c', '--config', help='JSON experiment config (optional for kernel)')
    experiment.add_argument('-o', '--output', help='Ratio CSV (default: config output)')

    return parser


def configure_logging(verbose: bool):
    """Configure logging based on verbosity level"""
    level = logging.DEBUG if verbose else logging.INFO
    setup_logger(LOGGER_NAME, level)

    if verbose:
        logger.info("Verbose logging enabled")


def parse_json_arg(text: str, label: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON for {label}: {e}") from e


def emit(values: Dict[str, Any]):
    """Print key=value lines on stdout"""
    for key, value in values.items():
        if isinstance(value, bool):
            value = str(value).lower()
        print(f"{key}={value}")


def command_check_modulus(args) -> int:
    spec: Dict[str, Any] = {'family': args.family}
    if args.alpha is not None:
        spec['alpha'] = args.alpha
    if args.beta is not None:
        spec['beta'] = args.beta
    if args.knots is not None:
        spec['knots'] = parse_json_arg(args.knots, '--knots')
    if args.cap is not None:
        spec['cap'] = args.cap

    report = check_regular(Modulus.from_spec(spec), args.epsilon)
    emit({
        'family': args.family,
        'is_regular': report.is_regular,
        'dini_value': report.dini_value,
        'almost_dec_constant': report.almost_dec_constant,
        'weak_constant': report.weak_constant,
        'linear_quotient_constant': report.linear_quotient_constant,
    })
    return 0


def command_transform(args) -> int:
    if not validate_all_inputs(None, args.input, args.output):
        return 1
    f = load_grid_csv(args.input)
    if args.domain:
        d = domain_from_spec(parse_json_arg(args.domain, '--domain'))
        out = restricted_beurling(d, f, args.method, args.pad_factor, local_correction=args.local_correction)
    elif args.method == 'spectral':
        out = beurling_spectral(f, args.pad_factor)
    else:
        values = beurling_direct_many(f, f.centers().ravel(), local_correction=args.local_correction)
        out = f.with_values(values.reshape(f.n, f.n))

    save_grid_csv(out, args.output)
    if args.geotiff:
        save_grid_geotiff(out, args.geotiff)
    emit({'output': args.output, 'sup_norm': float(np.abs(out.values).max())})
    return 0


def command_seminorm(args) -> int:
    if not validate_all_inputs(None, args.input, args.output):
        return 1
    f = load_grid_csv(args.input)
    m = Modulus.from_spec(parse_json_arg(args.modulus, '--modulus'))
    d = domain_from_spec(parse_json_arg(args.domain, '--domain')) if args.domain else None

    if args.kind == 'campanato':
        estimate = campanato_seminorm(f, m, args.p, d, args.depth, args.shifts, args.centering)
    else:
        if d is None or args.collar is None:
            raise ConfigError("Bloch seminorm needs --domain and --collar")
        estimate = bloch_seminorm(f, d, m, tuple(args.collar), args.side)

    if args.output:
        save_seminorm_csv(estimate, args.output)
    emit({'kind': args.kind, 'value': estimate.value})
    return 0


def command_extend(args) -> int:
    if not validate_all_inputs(None, args.input, args.output):
        return 1
    f = load_grid_csv(args.input)
    d = domain_from_spec(parse_json_arg(args.domain, '--domain'))
    if not validate_grid_for_domain(f, d):
        return 1
    target = f.box if args.target_side is None else Square(f.box.center, args.target_side)

    if d.kind == 'disk' and d.radius == 1.0:
        out = disk_reflect_extend(f, target, args.n)
    else:
        out = collar_reflect_extend(d, f, target, args.n)
    save_grid_csv(out, args.output)
    emit({'output': args.output})
    return 0


def command_experiment(args, parser) -> int:
    if args.config is None and args.name != 'kernel':
        parser.error(f"experiment {args.name} requires --config")
    if not validate_all_inputs(args.config, None, args.output):
        return 1

    if args.config is None:
        cfg = ExperimentConfig(modulus={'family': 'power', 'alpha': 0.5}, domain={'kind': 'disk'})
    else:
        cfg = load_experiment_config(args.config)
    report = run_experiment(args.name, cfg)

    output = args.output or cfg.output or f"{args.name}_ratios.csv"
    logger.info(f"Output: {output}")
    save_experiment_results(report, asdict(cfg), output)
    emit({'experiment': args.name, 'output': output, 'max_ratio': report.max_ratio,
          **{f"verdict_{k}": v for k, v in report.verdicts.items()}})
    return 0


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, dispatch and map errors to exit codes

    Args:
        argv: Argument list (default: sys.argv[1:])

    Returns:
        Exit code: 0 success, 1 validation error, 2 numerical/resolution error, 64 usage
    """
    parser = create_argument_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.verbose)
    logger.info(f"Starting command: {args.command}")

    handlers = {
        'check-modulus': command_check_modulus,
        'transform': command_transform,
        'seminorm': command_seminorm,
        'extend': command_extend,
    }
    try:
        if args.command == 'experiment':
            return command_experiment(args, parser)
        return handlers[args.command](args)
    except SystemExit as e:
        return int(e.code or 0)
    except BeurlingToolkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("Processing interrupted by user")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        return 1


def main():
    """
    Main CLI entry point
    """
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
