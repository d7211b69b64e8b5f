"""Configuration module for StatusQuo.

Process settings come from environment variables (optionally a ``.env``
file); experiment settings come from a YAML document read by ``load_config``.
"""

import logging
import os
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from dotenv import load_dotenv

from .agents.models import SQConfig
from .data.models import (
    DEFAULT_ENVIRONMENT,
    DEFAULT_LEARNERS,
    EXPERIMENT_KINDS,
    DistillConfig,
    EnvironmentConfig,
    ExperimentConfig,
)
from .errors import ConfigValidationError

# Load environment variables from .env file
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(dotenv_path=env_path)

logger = logging.getLogger(__name__)


class Config:
    """Process-level settings."""

    OUTPUT_DIR = Path(os.getenv('STATUSQUO_OUTPUT_DIR', 'runs'))
    CACHE_DB = os.getenv('STATUSQUO_CACHE_DB', '')
    THREADS = int(os.getenv('STATUSQUO_THREADS', '1'))
    LOG_LEVEL = os.getenv('STATUSQUO_LOG_LEVEL', 'INFO').upper()

    # Experiment defaults that differ from the generic SQConfig ones
    IMP_GAMMA = 0.9
    COIN_CRITIC_STEP = 0.01
    MATRIX_EPOCHS = 200
    COIN_EPOCHS = 100
    STATIONARY_ETA = 20

    @classmethod
    def cache_db_for(cls, output_dir: Union[str, Path]) -> Path:
        """Run store location: ``STATUSQUO_CACHE_DB`` if set, else inside the output directory."""
        if cls.CACHE_DB:
            return Path(cls.CACHE_DB)
        return Path(output_dir) / 'statusquo.duckdb'

    @classmethod
    def ensure_output_dir(cls, output_dir: Optional[Union[str, Path]] = None) -> Path:
        path = Path(output_dir) if output_dir is not None else cls.OUTPUT_DIR
        path.mkdir(parents=True, exist_ok=True)
        return path


TOP_LEVEL_KEYS = (
    'experiment', 'environment', 'learners', 'sq', 'seeds', 'epochs',
    'output_dir', 'env', 'distill', 'z_values', 'log_every',
)
COIN_EXPERIMENTS = ('coin_sq', 'coin_gamedistill')


def parse_seeds(value: Union[str, int, List[int]]) -> List[int]:
    """Seeds from ``'0-19'``, ``'1,4,7'``, a single int or a list."""
    if isinstance(value, bool):
        raise ConfigValidationError('seeds', 'expected integers')
    if isinstance(value, int):
        return [value]
    if isinstance(value, (list, tuple)):
        if not all(isinstance(s, int) and not isinstance(s, bool) for s in value):
            raise ConfigValidationError('seeds', 'expected a list of integers')
        return list(value)
    text = str(value).strip()
    try:
        if '-' in text and ',' not in text:
            low, high = (int(part) for part in text.split('-', 1))
            if high < low:
                raise ConfigValidationError('seeds', f'empty range {text}')
            return list(range(low, high + 1))
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError as e:
        raise ConfigValidationError('seeds', f'cannot parse {text!r}') from e


def _is_integer(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _section(raw: Dict[str, Any], key: str) -> Dict[str, Any]:
    section = raw.get(key) or {}
    if not isinstance(section, dict):
        raise ConfigValidationError(key, 'expected a mapping')
    return section


def _check_keys(section: Dict[str, Any], allowed, prefix: str = ''):
    for key in section:
        if key not in allowed:
            raise ConfigValidationError(f'{prefix}{key}', 'unknown key')


def _build_sq(raw: Dict[str, Any], environment: str) -> SQConfig:
    allowed = [f.name for f in fields(SQConfig)]
    _check_keys(raw, allowed, 'sq.')
    values = {
        'gamma': Config.IMP_GAMMA if environment == 'imp' else SQConfig.gamma,
        'critic_step': Config.COIN_CRITIC_STEP if environment == 'coin' else SQConfig.critic_step,
        **raw,
    }
    for name in ('z', 'batch_size'):
        if name in values and (not _is_integer(values[name]) or values[name] < 1):
            raise ConfigValidationError(f'sq.{name}', 'must be an integer of at least 1')
    for name in ('alpha', 'beta', 'gamma', 'actor_step', 'critic_step'):
        if name in values and not _is_number(values[name]):
            raise ConfigValidationError(f'sq.{name}', 'must be a number')
    if not 0.0 <= values['gamma'] < 1.0:
        raise ConfigValidationError('sq.gamma', f'must lie in [0, 1), got {values["gamma"]}')
    for name in ('alpha', 'beta'):
        if values.get(name, 0) < 0:
            raise ConfigValidationError(f'sq.{name}', 'must be non-negative')
    for name in ('actor_step', 'critic_step'):
        if name in values and values[name] <= 0:
            raise ConfigValidationError(f'sq.{name}', 'must be positive')
    return SQConfig(**values)


def _build(dataclass_type, raw: Dict[str, Any], prefix: str):
    _check_keys(raw, [f.name for f in fields(dataclass_type)], f'{prefix}.')
    for f in fields(dataclass_type):
        if f.name not in raw:
            continue
        if f.type in (int, 'int') and not _is_integer(raw[f.name]):
            raise ConfigValidationError(f'{prefix}.{f.name}', 'must be an integer')
        if f.type in (float, 'float') and not _is_number(raw[f.name]):
            raise ConfigValidationError(f'{prefix}.{f.name}', 'must be a number')
    try:
        return dataclass_type(**raw)
    except TypeError as e:
        raise ConfigValidationError(prefix, str(e)) from e


def config_from_dict(raw: Optional[Dict[str, Any]]) -> ExperimentConfig:
    """Validate a parsed document and fill in defaults."""
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigValidationError('config', 'the document must be a mapping')
    _check_keys(raw, TOP_LEVEL_KEYS)

    experiment = raw.get('experiment', 'ipd')
    if experiment not in EXPERIMENT_KINDS:
        raise ConfigValidationError('experiment', f'must be one of {EXPERIMENT_KINDS}')
    environment = raw.get('environment', DEFAULT_ENVIRONMENT[experiment])
    learners = raw.get('learners', DEFAULT_LEARNERS[experiment])
    if not isinstance(learners, (list, tuple)) or len(learners) != 2:
        raise ConfigValidationError('learners', 'expected a list of two learner kinds')

    env_raw = dict(_section(raw, 'env'))
    if experiment == 'stationary':
        env_raw.setdefault('stationarity', Config.STATIONARY_ETA)
    env = _build(EnvironmentConfig, env_raw, 'env')
    distill = _build(DistillConfig, _section(raw, 'distill'), 'distill')

    is_coin = environment == 'coin' or experiment in COIN_EXPERIMENTS
    default_epochs = Config.COIN_EPOCHS if is_coin else Config.MATRIX_EPOCHS
    epochs = raw.get('epochs', default_epochs)
    if not _is_integer(epochs):
        raise ConfigValidationError('epochs', 'must be an integer')

    values = {
        'experiment': experiment,
        'environment': environment,
        'learners': tuple(learners),
        'sq': _build_sq(_section(raw, 'sq'), environment),
        'epochs': epochs,
        'env': env,
        'distill': distill,
        'output_dir': str(raw.get('output_dir', Config.OUTPUT_DIR)),
    }
    if 'seeds' in raw:
        values['seeds'] = parse_seeds(raw['seeds'])
    if 'z_values' in raw:
        z_values = raw['z_values']
        if not isinstance(z_values, (list, tuple)) or not all(_is_integer(z) and z >= 1 for z in z_values):
            raise ConfigValidationError('z_values', 'expected a list of integers of at least 1')
        values['z_values'] = list(z_values)
    if 'log_every' in raw:
        if not _is_integer(raw['log_every']):
            raise ConfigValidationError('log_every', 'must be an integer')
        values['log_every'] = raw['log_every']
    return ExperimentConfig(**values)


def load_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Read and validate a YAML experiment file.

    Args:
        path: YAML document; an empty file yields the default IPD experiment
        overrides: Top-level keys replacing those of the file (command-line flags)

    Raises:
        ConfigValidationError: unknown keys or out-of-range values, naming the field
    """
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding='utf-8'))
    except yaml.YAMLError as e:
        raise ConfigValidationError('config', f'{path} is not valid YAML: {e}') from e
    if overrides:
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigValidationError('config', 'the document must be a mapping')
        raw = {**raw, **overrides}
    config = config_from_dict(raw)
    logger.info(
        f"Loaded {config.experiment} config from {path}: {config.learners[0]} vs {config.learners[1]}, "
        f"{len(config.seeds)} seeds, {config.epochs} epochs"
    )
    return config
