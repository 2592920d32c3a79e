import numpy as np

from scipy import stats

from snm.app.distributions.model.base import FamilyModel
from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.common.enums import DistributionFamily


class InverseGaussianModel(FamilyModel):
    """InverseGaussian(mean m, shape k), tilted law IG(m / sqrt(1 + 2m²λ/k), k)"""

    family = DistributionFamily.inverse_gaussian

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        super().__init__(spec, config)
        self.m = spec.param('mean')
        self.k = spec.param('shape')

    def _root(self, lam: np.ndarray | float) -> np.ndarray:
        return np.sqrt(1.0 + 2.0 * self.m**2 * np.asarray(lam, dtype=float) / self.k)

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        return (self.k / self.m) * (1.0 - self._root(lam))

    def zero_mass(self) -> float:
        return 0.0

    def _tilted_mean(self, lam: float) -> float:
        return float(self.m / self._root(lam))

    def build_tilted_law(self, lam: float) -> stats.rv_continuous:
        return stats.invgauss(self._tilted_mean(lam) / self.k, scale=self.k)

    def tilted_mean(self, lam: float) -> float:
        return self._tilted_mean(lam)

    def tilted_variance(self, lam: float) -> float:
        return self._tilted_mean(lam) ** 3 / self.k

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return rng.wald(self.m, self.k, size=size)
