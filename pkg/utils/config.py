# Run configuration: strict JSON parsing with every violation reported at once

# Import requirements
import json
import logging
import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from controllers.experiments import SweepSpec
from controllers.simulation import IntegrationConfig
from controllers.solver import SolverOptions
from controllers.verification import VerificationOptions
from models.equilibria import MassVector
from models.errors import CatalogIOError, ConfigValidationError, ValidationError
from models.geometry import PolarConfiguration, SpaceSpec, solve_z_block, validate_configuration

logger = logging.getLogger(__name__)

THREADS_ENV = 'NBODY_THREADS'

PROBE_KINDS = ('min_distance', 'boundedness', 'cluster_blowup', 'large_radius')

PROBE_FAMILIES = ('polygon', 'solver')

TOP_LEVEL_KEYS = {'sigma', 'k', 'masses', 'r', 'alphas', 'z_block', 'angular_velocity',
                  'integration', 'solver', 'sweep', 'probe', 'verification'}

# Section name -> {key: kind}; kinds are checked by _check_value
SECTION_KEYS = {
    'integration': {'step_size': 'positive', 't_end': 'positive', 'projection': 'bool',
                    'output_stride': 'positive_int'},
    'solver': {'max_iterations': 'positive_int', 'tolerance': 'positive',
               'max_halvings': 'positive_int', 'fd_step': 'positive',
               'consistency_tolerance': 'positive'},
    'sweep': {'r_grid': 'positive_list', 'starts': 'positive_int', 'seed': 'nonnegative_int',
              'seed_policy': 'str', 'min_separation': 'positive', 'dedup_tolerance': 'positive'},
    'verification': {'residual_threshold': 'positive', 'consistency_threshold': 'positive',
                     'rigidity_threshold': 'positive', 'steps_per_period': 'positive_int'},
    'probe': {'kind': 'str', 'catalog': 'str', 'a_fixed': 'positive', 'family': 'str',
              'r_search': 'positive_list', 'grid_points': 'positive_int', 'r': 'positive',
              'delta_grid': 'positive_list', 'far_angle': 'number', 'delta': 'positive',
              'r_grid': 'positive_list'},
}

REQUIRED_SECTION_KEYS = {
    'integration': {'t_end'},
    'sweep': {'r_grid'},
    'probe': {'kind'},
}


@dataclass(frozen=True)
class ProbeSettings:
    """Probe selection and its parameters; unused fields stay None"""
    kind: str
    catalog: Optional[str] = None
    a_fixed: Optional[float] = None
    family: str = 'polygon'
    r_search: Tuple[float, float] = (0.1, 10.0)
    grid_points: int = 100
    r: Optional[float] = None
    delta_grid: Optional[Tuple[float, ...]] = None
    far_angle: Optional[float] = None
    delta: Optional[float] = None
    r_grid: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, validated"""
    space: SpaceSpec
    masses: MassVector
    cfg: Optional[PolarConfiguration] = None
    angular_velocity: Optional[float] = None
    integration: Optional[IntegrationConfig] = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    verification: VerificationOptions = field(default_factory=VerificationOptions)
    sweep: Optional[SweepSpec] = None
    probe: Optional[ProbeSettings] = None
    threads: int = 1


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_value(value, kind, where, violations) -> bool:
    if kind == 'bool':
        ok = isinstance(value, bool)
        expected = "a boolean"
    elif kind == 'str':
        ok = isinstance(value, str)
        expected = "a string"
    elif kind == 'number':
        ok = _is_number(value)
        expected = "a number"
    elif kind == 'positive':
        ok = _is_number(value) and value > 0
        expected = "a positive number"
    elif kind == 'positive_int':
        ok = isinstance(value, int) and not isinstance(value, bool) and value > 0
        expected = "a positive integer"
    elif kind == 'nonnegative_int':
        ok = isinstance(value, int) and not isinstance(value, bool) and value >= 0
        expected = "a nonnegative integer"
    elif kind == 'positive_list':
        ok = isinstance(value, list) and all(_is_number(v) and v > 0 for v in value)
        expected = "a list of positive numbers"
    elif kind == 'number_list':
        ok = isinstance(value, list) and all(_is_number(v) for v in value)
        expected = "a list of numbers"
    else:
        raise ValueError(f"unknown kind {kind}")
    if not ok:
        violations.append(f"{where} must be {expected}, got {value!r}")
    return ok


def _section(raw, name, violations) -> Optional[dict]:
    if name not in raw:
        return None
    data = raw[name]
    if not isinstance(data, dict):
        violations.append(f"{name} must be an object")
        return None
    allowed = SECTION_KEYS[name]
    for key in sorted(set(data) - set(allowed)):
        violations.append(f"unknown key {name}.{key}")
    for key in sorted(REQUIRED_SECTION_KEYS.get(name, set()) - set(data)):
        violations.append(f"missing key {name}.{key}")
    return {key: value for key, value in data.items()
            if key in allowed and _check_value(value, allowed[key], f"{name}.{key}", violations)}


def threads_from_environment(environ=None) -> int:
    """Worker cap from NBODY_THREADS; 1 when unset"""
    environ = os.environ if environ is None else environ
    value = environ.get(THREADS_ENV)
    if value is None or value == '':
        return 1
    try:
        threads = int(value)
    except ValueError:
        threads = 0
    if threads < 1:
        raise ValidationError(f"{THREADS_ENV} must be a positive integer, got {value!r}")
    return threads


def _build(violations, label, factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except ValidationError as e:
        violations.append(f"{label}: {e}")
        return None


def build_config(raw: dict, environ=None) -> RunConfig:
    """
    Validate a decoded configuration object

    Raises:
        ConfigValidationError: listing every violation found
    """
    violations: List[str] = []
    if not isinstance(raw, dict):
        raise ConfigValidationError(["configuration must be a JSON object"])

    for key in sorted(set(raw) - TOP_LEVEL_KEYS):
        violations.append(f"unknown key {key}")
    for key in ('sigma', 'k', 'masses'):
        if key not in raw:
            violations.append(f"missing key {key}")

    sigma, k = raw.get('sigma'), raw.get('k')
    if 'sigma' in raw and not (_is_number(sigma) and sigma in (1, -1) and int(sigma) == sigma):
        violations.append(f"sigma must be +1 or -1, got {sigma!r}")
    if 'k' in raw and not (isinstance(k, int) and not isinstance(k, bool) and k >= 2):
        violations.append(f"k must be an integer >= 2, got {k!r}")
    masses = raw.get('masses')
    if 'masses' in raw:
        if not isinstance(masses, list) or not masses:
            violations.append(f"masses must be a non-empty list, got {masses!r}")
        else:
            for i, m in enumerate(masses):
                if not (_is_number(m) and m > 0):
                    violations.append(f"masses[{i}] must be positive, got {m!r}")
    if 'r' in raw:
        _check_value(raw['r'], 'positive', 'r', violations)
    if 'alphas' in raw:
        _check_value(raw['alphas'], 'number_list', 'alphas', violations)
    if ('r' in raw) != ('alphas' in raw):
        violations.append("r and alphas must be given together")
    if 'z_block' in raw:
        _check_value(raw['z_block'], 'number_list', 'z_block', violations)
    if 'angular_velocity' in raw and _check_value(raw['angular_velocity'], 'number',
                                                  'angular_velocity', violations):
        if raw['angular_velocity'] < 0:
            violations.append("angular_velocity must be nonnegative")

    sections = {name: _section(raw, name, violations) for name in SECTION_KEYS}
    probe = sections['probe']
    if probe and 'kind' in probe and probe['kind'] not in PROBE_KINDS:
        violations.append(f"probe.kind must be one of {PROBE_KINDS}, got {probe['kind']!r}")
    if probe and probe.get('family', 'polygon') not in PROBE_FAMILIES:
        violations.append(f"probe.family must be one of {PROBE_FAMILIES}, got {probe['family']!r}")
    sweep = sections['sweep']
    if sweep and sweep.get('seed_policy', 'random') not in ('random', 'polygon'):
        violations.append("sweep.seed_policy must be 'random' or 'polygon'")
    try:
        threads = threads_from_environment(environ)
    except ValidationError as e:
        violations.append(str(e))
        threads = 1
    if violations:
        raise ConfigValidationError(violations)

    # Shapes and types are sound; constructors check the cross-field invariants
    space = SpaceSpec(int(sigma), k)
    mass_vector = MassVector(masses)
    cfg = None
    if 'r' in raw:
        if len(raw['alphas']) != len(masses):
            violations.append(f"{len(raw['alphas'])} alphas for {len(masses)} masses")
        z_block = raw.get('z_block')
        if z_block is None:
            z_block = _build(violations, 'r', solve_z_block, raw['r'], space)
        if z_block is not None:
            candidate = PolarConfiguration(raw['r'], raw['alphas'], z_block)
            before = len(violations)
            _build(violations, 'configuration', validate_configuration, candidate, space)
            if len(violations) == before:
                cfg = candidate

    integration = None
    if sections['integration'] is not None and 't_end' in sections['integration']:
        section = sections['integration']
        integration = _build(violations, 'integration', IntegrationConfig,
                             step_size=section.get('step_size', 1e-3), t_end=section['t_end'],
                             projection_enabled=section.get('projection', True),
                             output_stride=section.get('output_stride', 100))
    solver = SolverOptions(**(sections['solver'] or {}),
                           great_circle_angular_velocity=raw.get('angular_velocity'))
    verification = VerificationOptions(**(sections['verification'] or {}))

    sweep_spec = None
    if sweep is not None and 'r_grid' in sweep:
        sweep_spec = _build(violations, 'sweep', SweepSpec, space=space, masses=mass_vector,
                            r_grid=tuple(sweep['r_grid']), starts=sweep.get('starts', 8),
                            seed=sweep.get('seed', 0),
                            seed_policy=sweep.get('seed_policy', 'random'),
                            min_separation=sweep.get('min_separation', 0.1),
                            angular_velocity=raw.get('angular_velocity'),
                            dedup_tolerance=sweep.get('dedup_tolerance', 1e-8),
                            threads=threads, solver=solver, verification=verification)

    probe_settings = None
    if probe is not None and 'kind' in probe:
        values = dict(probe)
        for key in ('r_search', 'delta_grid', 'r_grid'):
            if key in values:
                values[key] = tuple(values[key])
        if 'r_search' in values and len(values['r_search']) != 2:
            violations.append("probe.r_search must have exactly two entries")
        probe_settings = ProbeSettings(**values)

    if violations:
        raise ConfigValidationError(violations)
    return RunConfig(space, mass_vector, cfg, raw.get('angular_velocity'), integration,
                     solver, verification, sweep_spec, probe_settings, threads)


def parse_config(path, environ=None) -> RunConfig:
    """
    Read and validate a JSON configuration file

    Args:
        path: Configuration file
        environ (dict): Environment used for NBODY_THREADS, defaults to os.environ

    Returns:
        RunConfig: Validated configuration with defaults filled
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        raise CatalogIOError(f"cannot read configuration {path}: {e}") from e
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigValidationError([f"not valid JSON: {e}"]) from e
    config = build_config(raw, environ)
    logger.debug("Loaded configuration from %s", path)
    return config
