"""
Experiment configuration: JSON parsing of modulus and domain specs
"""
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from utils.logger_config import logger
from .errors import ConfigError
from .geometry import PlanarDomain, disk_domain, make_test_domain, star_domain
from .grid_function import is_power_of_two
from .moduli import Modulus


def domain_from_spec(spec: Dict[str, Any]) -> PlanarDomain:
    """
    Build a domain from a config dictionary

    Args:
        spec: {"kind": "disk", "radius": r}
              | {"kind": "star", "amplitude": a, "depth": k, "modulus": {...}}
              | {"kind": "star", "harmonics": [[k, a_k, b_k], ...], "radius": r}

    Returns:
        PlanarDomain
    """
    if not isinstance(spec, dict) or 'kind' not in spec:
        raise ConfigError(f"Domain spec must be a dictionary with a 'kind' key: {spec!r}")
    kind = spec['kind']
    try:
        if kind == 'disk':
            return disk_domain(float(spec.get('radius', 1.0)))
        if kind == 'star' and 'harmonics' in spec:
            harmonics = [(int(h[0]), float(h[1]), float(h[2]) if len(h) > 2 else 0.0)
                         for h in spec['harmonics']]
            return star_domain(harmonics, float(spec.get('radius', 1.0)))
        if kind == 'star':
            modulus = Modulus.from_spec(spec['modulus'])
            return make_test_domain(modulus, float(spec['amplitude']), int(spec['depth']))
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise ConfigError(f"Invalid {kind} domain spec {spec!r}: {e}") from e
    raise ConfigError(f"Unknown domain kind '{kind}'")


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters shared by every experiment runner"""
    modulus: Dict[str, Any]
    domain: Dict[str, Any]
    n: int = 256
    pad_factor: int = 4
    depth: int = 5
    shifts: int = 4
    seed: int = 0
    family_size: int = 10
    epsilon: float = 0.9
    output: Optional[str] = None
    box_side: Optional[float] = None
    amplitude: float = 1.0
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not is_power_of_two(int(self.n)):
            raise ConfigError(f"Grid size n must be a power of 2, got {self.n}")
        if self.depth < 2:
            raise ConfigError(f"Dyadic depth J must be at least 2, got {self.depth}")
        if self.family_size < 1:
            raise ConfigError(f"Family size must be at least 1, got {self.family_size}")
        if self.pad_factor < 2:
            raise ConfigError(f"pad_factor must be at least 2, got {self.pad_factor}")
        if not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon must lie in (0,1), got {self.epsilon}")
        # Specs must parse
        self.parsed_modulus()
        self.parsed_domain()

    def parsed_modulus(self) -> Modulus:
        return Modulus.from_spec(self.modulus)

    def parsed_domain(self) -> PlanarDomain:
        return domain_from_spec(self.domain)

    def with_changes(self, **changes) -> 'ExperimentConfig':
        data = asdict(self)
        data.update(changes)
        return ExperimentConfig(**data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        known = set(cls.__dataclass_fields__) - {'extra'}
        missing = {'modulus', 'domain'} - set(data)
        if missing:
            raise ConfigError(f"Config is missing required keys: {sorted(missing)}")
        kwargs = {k: v for k, v in data.items() if k in known}
        kwargs['extra'] = {k: v for k, v in data.items() if k not in known}
        try:
            return cls(**kwargs)
        except TypeError as e:
            raise ConfigError(f"Invalid config: {e}") from e


def load_experiment_config(config_path: Union[str, Path]) -> ExperimentConfig:
    """
    Load an experiment config from a JSON file

    Args:
        config_path: Path to the JSON config

    Returns:
        ExperimentConfig
    """
    config_path = Path(config_path)
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config {config_path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {config_path} must hold a JSON object")
    logger.info(f"Loaded experiment config: {config_path}")
    return ExperimentConfig.from_dict(data)
