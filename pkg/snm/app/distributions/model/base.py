from abc import ABC, abstractmethod
from collections.abc import Callable
from functools import cached_property
from typing import Any, ClassVar

import numpy as np

from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.distributions.utils.law import DiscreteLaw, law_gmd, lower_bound
from snm.app.distributions.utils.qmc import QmcEstimate, scrambled_sobol, tilted_xi1, xi1_from_points
from snm.app.quadrature.schema.quadrature import InnerAccuracy, QuadratureConfig
from snm.common.enums import DistributionFamily, SupportKind
from snm.common.exception import errors
from snm.core.conf import settings


# Per-model memo size, tilted laws are built for every quadrature node
_MEMO_LIMIT = 4096


class _Memo(dict):
    def remember(self, key: float, factory: Callable[[], Any]) -> Any:
        if key not in self:
            if len(self) >= _MEMO_LIMIT:
                self.clear()
            self[key] = factory()
        return self[key]


class FamilyModel(ABC):
    """
    Laplace transform, atom at zero and tilted laws of one distribution

    Subclasses provide closed forms where the tilted family is known and fall back on the
    generic numeric paths of this class otherwise. Tilted functionals are memoized per λ.
    ``inner`` keeps the worst relative error and the convergence of every numeric inner integral.
    """

    family: ClassVar[DistributionFamily]
    support_kind: ClassVar[SupportKind] = SupportKind.continuous

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        self.spec = spec
        self.config = config
        self._laws = _Memo()
        self._gmd = _Memo()
        self._xi1 = _Memo()
        self.inner = InnerAccuracy()

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.spec.text()})'

    # Laplace transform

    @abstractmethod
    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        """log E[e^(-λX)], vectorized over λ"""

    def laplace(self, lam: np.ndarray | float) -> np.ndarray:
        return np.exp(self.log_laplace(np.asarray(lam, dtype=float)))

    @abstractmethod
    def zero_mass(self) -> float:
        """P(X = 0)"""

    # Tilted laws

    @abstractmethod
    def build_tilted_law(self, lam: float) -> Any:
        """Law of X under e^(-λx) dF(x) / L(λ)"""

    def tilted_law(self, lam: float) -> Any:
        key = float(lam)
        return self._laws.remember(key, lambda: self.build_tilted_law(key))

    @property
    def base_law(self) -> Any:
        return self.tilted_law(0.0)

    def tilted_scale(self, lam: np.ndarray) -> np.ndarray | None:
        """s(λ) when F^(λ)(x) = F(x / s(λ)), else None"""
        return None

    @property
    def scale_key(self) -> tuple | None:
        """Families sharing a key share s(λ)"""
        return None

    @property
    def lower(self) -> float:
        return lower_bound(self.base_law)

    # Tilted moments

    def tilted_mean(self, lam: float) -> float:
        return float(self.tilted_law(lam).mean())

    def tilted_variance(self, lam: float) -> float:
        return float(self.tilted_law(lam).var())

    def tilted_raw_moment(self, lam: float, order: int) -> float:
        if order == 0:
            return 1.0
        return float(self.tilted_law(lam).moment(order))

    def tilted_gmd(self, lam: float) -> float:
        key = float(lam)
        return self._gmd.remember(key, lambda: self._compute_gmd(key))

    def _compute_gmd(self, lam: float) -> float:
        scale = self.tilted_scale(np.array([lam]))
        if scale is not None and lam > 0:
            return self.tilted_gmd(0.0) * float(scale[0])
        return self.inner.record(law_gmd(self.tilted_law(lam), self.config))

    def tilted_xi1(self, lam: float) -> QmcEstimate:
        key = float(lam)
        return self._xi1.remember(key, lambda: self._compute_xi1(key))

    def _compute_xi1(self, lam: float) -> QmcEstimate:
        law = self.tilted_law(lam)
        if isinstance(law, DiscreteLaw):
            return QmcEstimate(law.xi1(), 0.0)
        scale = self.tilted_scale(np.array([lam]))
        if scale is not None and lam > 0:
            return self.tilted_xi1(0.0).scaled(float(scale[0]) ** 2)
        if lam == 0:
            return xi1_from_points(self._qmc_base_points)
        return tilted_xi1(self._qmc_base_points, lam, self.lower, law.ppf, self._qmc_uniforms)

    @cached_property
    def _qmc_uniforms(self) -> np.ndarray:
        return scrambled_sobol(3, settings.QMC_LOG2_POINTS, settings.QMC_SCRAMBLES, settings.QMC_SEED)

    @cached_property
    def _qmc_base_points(self) -> np.ndarray:
        return np.asarray(self.base_law.ppf(self._qmc_uniforms), dtype=float)

    # Population values

    def mean(self) -> float:
        return self.tilted_mean(0.0)

    def variance(self) -> float:
        return self.tilted_variance(0.0)

    def gmd(self) -> float:
        return self.tilted_gmd(0.0)

    def expect_x_log_x(self) -> float:
        law = self.base_law
        return float(law.expect(lambda x: np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)))

    def theil(self) -> float:
        mean = self.mean()
        if mean == 0:
            return 0.0
        return self.expect_x_log_x() / mean - float(np.log(mean))

    def check_finite(self, name: str, value: float) -> float:
        if not np.isfinite(value):
            raise errors.CapabilityError(
                msg=f'{name} is infinite for {self.spec.text()}',
                data={'moment': name, 'distribution': self.spec.text()},
            )
        return value

    # Sampling

    @abstractmethod
    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        """Draws from the base law"""
