"""
Exception hierarchy shared by all core modules

Every error carries the process exit code the CLI reports for it:
validation-type failures exit with 1, numerical/resolution failures with 2.
"""

class BeurlingToolkitError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 1


class DomainError(BeurlingToolkitError):
    """An argument lies outside the evaluation domain of an operation"""


class PreconditionError(BeurlingToolkitError):
    """An operation precondition does not hold (box mismatch, support, ...)"""


class AmplitudeError(PreconditionError):
    """Perturbation amplitude too large: the radial profile is not positive"""


class ConfigError(BeurlingToolkitError):
    """Config file or spec dictionary cannot be parsed into valid objects"""


class ResolutionError(BeurlingToolkitError):
    """The grid is too coarse for the requested square, collar or scale"""
    exit_code = 2


class GeometryError(BeurlingToolkitError):
    """Degenerate boundary geometry (zero-speed parametrization)"""
    exit_code = 2


class NumericalError(BeurlingToolkitError):
    """Non-finite values produced by a computation"""
    exit_code = 2
