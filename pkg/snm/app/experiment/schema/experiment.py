import dataclasses
import math

from pathlib import Path
from typing import Any, Self

import numpy as np

from pydantic import Field, ValidationError, field_validator, model_validator

from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.common.enums import ExperimentCommand, OutputFormat, PopulationStatistic
from snm.common.exception import errors
from snm.common.schema import SchemaBase
from snm.core.conf import settings
from snm.core.path_conf import OUTPUT_DIR
from snm.utils.serializers import load_config_file

BIAS_CURVE_COLUMNS = (
    'family',
    'param',
    'n',
    'stat',
    'r',
    'population_value',
    'expected_value',
    'ratio_R',
    'quad_error',
    'converged',
    'error',
)
VARIANCE_CURVE_COLUMNS = (
    'family',
    'param',
    'n',
    'r',
    'population_value',
    'expected_value',
    'second_moment',
    'variance',
    'inner_std_error',
    'quad_error',
    'converged',
    'error',
)
DEBIAS_COLUMNS = ('alpha', 'n', 'method', 'bias', 'abs_bias', 'std_error', 'replications', 'seed')

# default sweeps of the published curves
DEFAULT_CURVE_GRID = '1.1:3.0:0.1'
DEFAULT_CURVE_N = (3, 5, 10, 20)
DEFAULT_DEBIAS_N = (20, 50)


def parse_grid(text: str) -> np.ndarray:
    """
    Parse ``A:B:STEP`` into the inclusive grid A, A + STEP, ..., or a single value ``A``

    :param text: Grid text
    :return:
    """
    try:
        parts = [float(p) for p in text.split(':')]
    except ValueError as e:
        raise errors.ConfigError(msg=f'Invalid grid {text!r}, expected A:B:STEP') from e
    if len(parts) == 1:
        return np.array(parts)
    if len(parts) != 3:
        raise errors.ConfigError(msg=f'Invalid grid {text!r}, expected A:B:STEP')
    start, stop, step = parts
    if not all(math.isfinite(p) for p in parts) or not step > 0 or stop < start:
        raise errors.ConfigError(msg=f'Invalid grid {text!r}, need finite A <= B and STEP > 0')
    count = math.floor((stop - start) / step + 1e-9) + 1
    return np.round(start + step * np.arange(count), 12)


def parse_counts(text: str) -> tuple[int, ...]:
    """Comma separated sample sizes"""
    try:
        counts = tuple(int(token) for token in text.replace(' ', '').split(',') if token)
    except ValueError as e:
        raise errors.ConfigError(msg=f'Invalid sample size list {text!r}') from e
    if not counts:
        raise errors.ConfigError(msg='Sample size list is empty')
    return counts


class ExperimentConfig(SchemaBase):
    """Resolved settings of one experiment run"""

    command: ExperimentCommand
    dist: str | None = Field(None, description='Distribution text form, e.g. pareto(shape=2)')
    stat: PopulationStatistic = Field(PopulationStatistic.gini, description='Statistic')
    n_list: tuple[int, ...] | None = Field(None, description='Sample sizes')
    param_grid: str | None = Field(None, description='Parameter grid A:B:STEP')
    grid_param: str | None = Field(None, description='Swept parameter, the family primary parameter by default')
    r: float = Field(0.0, description='Value of the statistic on the all-zero sample')
    replications: int = Field(settings.DEFAULT_REPLICATIONS, description='Monte Carlo replications')
    seed: int = Field(settings.DEFAULT_SEED, description='Seed of every random stream')
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    out: Path = Field(OUTPUT_DIR, description='Output directory or file')
    format: OutputFormat = Field(OutputFormat.csv, description='Output format')
    workers: int = Field(settings.WORKERS, description='Worker processes')
    quick: bool = Field(False, description='Validate enumeration checks only')
    suite: str | None = Field(None, description='Validate a single suite')
    scale: float = Field(1.0, description='Multiplier of validate replication counts')

    @field_validator('n_list', mode='before')
    @classmethod
    def split_counts(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_counts(value)
        if isinstance(value, int):
            return (value,)
        return value

    @model_validator(mode='after')
    def check_config(self) -> Self:
        if self.n_list is not None and (not self.n_list or min(self.n_list) < 1):
            raise errors.ConfigError(msg='Sample sizes must be positive', data={'n_list': self.n_list})
        if self.n_list is not None and self.stat != PopulationStatistic.theil and min(self.n_list) < 2:
            raise errors.ConfigError(msg=f'{self.stat} needs sample sizes of at least 2', data={'n_list': self.n_list})
        if self.param_grid is not None:
            parse_grid(self.param_grid)
        if self.replications < 1 or self.workers < 1 or not self.scale > 0:
            raise errors.ConfigError(msg='replications, workers and scale must be positive')
        return self

    @classmethod
    def build(cls, flags: dict[str, Any], config_file: str | Path | None = None) -> 'ExperimentConfig':
        """
        Merge defaults, then the config file, then flags that were given

        :param flags: Command-line values, None for flags not given
        :param config_file: TOML or JSON file
        :return:
        """
        values: dict[str, Any] = {}
        quadrature: dict[str, Any] = {}
        if config_file is not None:
            content = load_config_file(config_file)
            quadrature.update(content.pop('quadrature', None) or {})
            values.update(content)
        quadrature.update(flags.pop('quadrature', None) or {})
        values.update({k: v for k, v in flags.items() if v is not None})
        values['quadrature'] = {k: v for k, v in quadrature.items() if v is not None}
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            raise errors.ConfigError(msg=f'Invalid experiment config: {e}') from e

    def distribution(self, default: str | None = None) -> DistributionSpec:
        text = self.dist or default
        if text is None:
            raise errors.ConfigError(msg=f'{self.command} needs --dist')
        return DistributionSpec.parse(text)

    def grid(self, default: str | None = None) -> np.ndarray | None:
        text = self.param_grid or default
        return None if text is None else parse_grid(text)

    def counts(self, default: tuple[int, ...]) -> tuple[int, ...]:
        return self.n_list or default


@dataclasses.dataclass(frozen=True)
class ValidationCheck:
    suite: str
    name: str
    engine: float
    oracle: float
    band: float
    passed: bool
    detail: str = ''


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[ValidationCheck]:
        return [check for check in self.checks if not check.passed]
