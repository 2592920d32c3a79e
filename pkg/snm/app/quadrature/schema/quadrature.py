import dataclasses

from typing import Self

from pydantic import Field, model_validator

from snm.common.enums import TransformType
from snm.common.exception import errors
from snm.common.schema import SchemaBase
from snm.core.conf import settings


class QuadratureConfig(SchemaBase):
    """Adaptive quadrature settings for integrals over [0, inf)"""

    rel_tol: float = Field(settings.QUADRATURE_REL_TOL, description='Relative tolerance')
    abs_tol: float = Field(settings.QUADRATURE_ABS_TOL, description='Absolute tolerance')
    max_subdivisions: int = Field(settings.QUADRATURE_MAX_SUBDIVISIONS, description='Maximum number of intervals')
    transform: TransformType = Field(TransformType(settings.QUADRATURE_TRANSFORM), description='Change of variable')
    truncation_lambda_max: float | None = Field(None, description='Upper limit for none_with_truncation')
    initial_intervals: int = Field(1, description='Equal parts of the mapped range before adaptive bisection')

    @model_validator(mode='after')
    def check_config(self) -> Self:
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise errors.ConfigError(msg='rel_tol and abs_tol must be positive', data=self.model_dump())
        if self.max_subdivisions < 1:
            raise errors.ConfigError(msg='max_subdivisions must be at least 1', data=self.model_dump())
        if not 1 <= self.initial_intervals <= self.max_subdivisions:
            raise errors.ConfigError(
                msg='initial_intervals must lie between 1 and max_subdivisions', data=self.model_dump()
            )
        if self.transform == TransformType.none_with_truncation and not (self.truncation_lambda_max or 0) > 0:
            raise errors.ConfigError(
                msg='truncation_lambda_max must be positive with none_with_truncation', data=self.model_dump()
            )
        return self

    def tighter(self, factor: float = 0.1) -> 'QuadratureConfig':
        """Copy with both tolerances scaled down, used for inner integrals"""
        return self.model_copy(update={'rel_tol': self.rel_tol * factor, 'abs_tol': self.abs_tol * factor})

    def partitioned(self, intervals: int) -> 'QuadratureConfig':
        """Copy starting from at least ``intervals`` equal parts"""
        intervals = min(max(self.initial_intervals, intervals), self.max_subdivisions)
        return self.model_copy(update={'initial_intervals': intervals})


@dataclasses.dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    subdivisions_used: int
    converged: bool
    evaluations: int = 0
    # per-component values for vector-valued integrands, value is their mean
    components: tuple[float, ...] = ()

    def scaled(self, factor: float) -> 'IntegralResult':
        return dataclasses.replace(
            self,
            value=self.value * factor,
            error_estimate=self.error_estimate * abs(factor),
            components=tuple(c * factor for c in self.components),
        )


@dataclasses.dataclass
class InnerAccuracy:
    """Worst relative error and overall convergence of the inner integrals behind tilted functionals"""

    relative_error: float = 0.0
    converged: bool = True
    integrals: int = 0

    def record(self, result: IntegralResult) -> float:
        """Account for one inner integral and return its value"""
        self.integrals += 1
        self.converged = self.converged and result.converged
        if result.value != 0:
            self.relative_error = max(self.relative_error, result.error_estimate / abs(result.value))
        return result.value

    def merge(self, other: 'InnerAccuracy') -> 'InnerAccuracy':
        return InnerAccuracy(
            relative_error=max(self.relative_error, other.relative_error),
            converged=self.converged and other.converged,
            integrals=self.integrals + other.integrals,
        )
