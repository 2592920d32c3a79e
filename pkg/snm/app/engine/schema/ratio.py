import dataclasses

import numpy as np

from snm.app.engine.model.kernel import TKernel
from snm.common.exception import errors


@dataclasses.dataclass(frozen=True)
class RatioStatistic:
    """V(X) = T(X) / S_n^α, and r when every observation is zero"""

    kernel: TKernel
    power: float
    fallback_r: float = 0.0

    def __post_init__(self) -> None:
        if not (self.power > 0 and np.isfinite(self.power)):
            raise errors.ConfigError(msg=f'Power must be positive, got {self.power!r}')
        if not (self.fallback_r >= 0 and np.isfinite(self.fallback_r)):
            raise errors.ConfigError(msg=f'Fallback r must be finite and non-negative, got {self.fallback_r!r}')
        fixed = self.kernel.fixed_power
        if fixed is not None and fixed != self.power:
            raise errors.ConfigError(
                msg=f'Kernel {self.kernel.label()} is defined for power {fixed}, got {self.power}',
                data={'kernel': self.kernel.label(), 'power': self.power},
            )

    def ratio(self, x: np.ndarray) -> np.ndarray:
        """V on samples of shape (..., n)"""
        x = np.asarray(x, dtype=float)
        total = x.sum(axis=-1)
        positive = total > 0
        numerator = self.kernel.evaluate(x)
        with np.errstate(divide='ignore', invalid='ignore'):
            values = numerator / np.where(positive, total, 1.0) ** self.power
        return np.where(positive, values, self.fallback_r)

    def sup_abs(self, n: int) -> float | None:
        """sup |V| over non-negative samples of size n, None when unknown"""
        bound = self.kernel.sup_ratio(n, self.power)
        if bound is None:
            return None
        return max(bound, self.fallback_r)

    def label(self) -> str:
        return f'{self.kernel.label()}/S^{self.power:g}'


@dataclasses.dataclass(frozen=True)
class MomentResult:
    value: float
    quadrature_error: float
    atom_term: float
    converged: bool
    evaluations: int = 0
    subdivisions_used: int = 0
    # spread of the λ-integral over replicate inner estimates, None for exact tilted expectations
    inner_std_error: float | None = None

    @property
    def integral_part(self) -> float:
        return self.value - self.atom_term

    @property
    def total_error(self) -> float:
        return self.quadrature_error + (self.inner_std_error or 0.0)

    def as_dict(self) -> dict:
        return {**dataclasses.asdict(self), 'integral_part': self.integral_part}


@dataclasses.dataclass(frozen=True)
class SanityCase:
    label: str
    expected: float
    value: float
    quadrature_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.value - self.expected) <= self.tolerance + self.quadrature_error


@dataclasses.dataclass(frozen=True)
class SanityReport:
    distribution: str
    n: int
    cases: tuple[SanityCase, ...]

    @property
    def passed(self) -> bool:
        return all(case.passed for case in self.cases)
