"""
Run configuration for sdwbound
Flat key = value files with namespaced keys (grid.*, solver.*, optimizer.*, quad.*, run.*)
"""

import logging
import os
from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = 'SDW_BOUND_CONFIG'


@dataclass(frozen=True)
class GridSettings:
    """Discretization of the scaled x axis"""
    points_per_decade: int = 24
    x_min_factor: float = 1e-3   # x_min = x0 estimate * factor
    x_max_cut: float = 0.0       # 0 derives the cut from the solver tolerance
    max_extensions: int = 4      # plateau re-checks, one decade each


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-10
    max_iter: int = 5000
    relaxation: float = 1.0
    use_volume_scale: bool = False


@dataclass(frozen=True)
class OptimizerSettings:
    bracket_factor: float = 20.0
    rel_tol: float = 1e-3
    max_expansions: int = 2
    fallback_points: int = 20


@dataclass(frozen=True)
class QuadratureSettings:
    """Panel layout of the Fermi-gas quadrature"""
    radial_panels: int = 4
    axial_panels: int = 6
    order: int = 10
    refine_depth: int = 24
    tolerance: float = 1e-6

    def refined(self):
        """Every panel halved and four more refinement levels, for error estimates"""
        return replace(self, radial_panels=2 * self.radial_panels,
                       axial_panels=2 * self.axial_panels,
                       refine_depth=self.refine_depth + 4)


@dataclass(frozen=True)
class RunSettings:
    threads: int = 1
    sdw_count: int = 1
    out_dir: str = '.'


@dataclass(frozen=True)
class RunConfig:
    grid: GridSettings = field(default_factory=GridSettings)
    solver: SolverSettings = field(default_factory=SolverSettings)
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    quad: QuadratureSettings = field(default_factory=QuadratureSettings)
    run: RunSettings = field(default_factory=RunSettings)

    def with_overrides(self, overrides):
        """
        Return a copy with namespaced overrides applied

        Args:
            overrides (dict): e.g. {'solver.tol': 1e-8}; None values are skipped

        Returns:
            RunConfig: Updated configuration
        """
        sections = {f.name: getattr(self, f.name) for f in fields(self)}
        for key, raw in overrides.items():
            if raw is None:
                continue
            section_name, name = _split_key(key)
            section = sections[section_name]
            value = _coerce(key, raw, _field_type(section, name))
            sections[section_name] = replace(section, **{name: value})
        return RunConfig(**sections)


def _split_key(key):
    if '.' not in key:
        raise ConfigError(f"Config key {key!r} must be namespaced, e.g. solver.tol")
    section_name, name = key.split('.', 1)
    section = getattr(RunConfig(), section_name, None)
    if section is None or name not in {f.name for f in fields(section)}:
        raise ConfigError(f"Unknown config key: {key}")
    return section_name, name


def _field_type(section, name):
    return type(getattr(section, name))


def _coerce(key, raw, target):
    if isinstance(raw, target) and not (target is int and isinstance(raw, bool)):
        return raw
    text = str(raw).strip()
    try:
        if target is bool:
            lowered = text.lower()
            if lowered in ('1', 'true', 'yes', 'on'):
                return True
            if lowered in ('0', 'false', 'no', 'off'):
                return False
            raise ValueError(text)
        if target is int:
            value = float(text)
            if not value.is_integer():
                raise ValueError(text)
            return int(value)
        return target(text)
    except ValueError:
        raise ConfigError(f"Cannot parse value {text!r} for {key} ({target.__name__})")


def parse_config_text(text, source='<string>'):
    """
    Parse flat key = value lines into a dict of raw strings

    Args:
        text (str): File contents
        source (str): Name used in error messages

    Returns:
        dict: key -> raw value
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split('#', 1)[0].strip()
        if not stripped:
            continue
        if '=' not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split('=', 1))
        _split_key(key)
        values[key] = value
    return values


def load_config(path=None, overrides=None):
    """
    Build a RunConfig from defaults, the SDW_BOUND_CONFIG file, an explicit file and overrides

    Args:
        path (str): Optional config file given on the command line
        overrides (dict): Namespaced values that win over every file

    Returns:
        RunConfig: The resolved configuration
    """
    config = RunConfig()
    for candidate in (os.environ.get(CONFIG_ENV_VAR), path):
        if not candidate:
            continue
        if not os.path.exists(candidate):
            raise ConfigError(f"Config file not found: {candidate}")
        with open(candidate, 'r', encoding='utf-8') as f:
            config = config.with_overrides(parse_config_text(f.read(), candidate))
        logger.debug("⚙️ Loaded config from %s", candidate)
    if overrides:
        config = config.with_overrides(overrides)
    return config
