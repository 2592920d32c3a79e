import numpy as np

from scipy import special, stats

from snm.app.distributions.model.base import FamilyModel
from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.common.enums import DistributionFamily


class GammaModel(FamilyModel):
    """Gamma(shape, scale), tilted law Gamma(shape, scale / (1 + scale λ))"""

    family = DistributionFamily.gamma

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        super().__init__(spec, config)
        self.shape = spec.param('shape')
        self.scale = spec.param('scale')

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        return -self.shape * np.log1p(self.scale * lam)

    def zero_mass(self) -> float:
        return 0.0

    def tilted_scale(self, lam: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + self.scale * np.asarray(lam, dtype=float))

    @property
    def scale_key(self) -> tuple:
        return 'rational', self.scale

    def build_tilted_law(self, lam: float) -> stats.rv_continuous:
        return stats.gamma(self.shape, scale=self.scale / (1.0 + self.scale * lam))

    def _theta(self, lam: float) -> float:
        return self.scale / (1.0 + self.scale * lam)

    def tilted_mean(self, lam: float) -> float:
        return self.shape * self._theta(lam)

    def tilted_variance(self, lam: float) -> float:
        return self.shape * self._theta(lam) ** 2

    def tilted_raw_moment(self, lam: float, order: int) -> float:
        return float(np.exp(special.gammaln(self.shape + order) - special.gammaln(self.shape))) * self._theta(lam) ** order

    def tilted_gmd(self, lam: float) -> float:
        # 2θ Γ(a + 1/2) / (√π Γ(a))
        log_ratio = special.gammaln(self.shape + 0.5) - special.gammaln(self.shape)
        return float(2.0 * self._theta(lam) * np.exp(log_ratio) / np.sqrt(np.pi))

    def theil(self) -> float:
        return float(special.digamma(self.shape + 1.0) - np.log(self.shape))

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return rng.gamma(self.shape, self.scale, size=size)


class ExponentialModel(GammaModel):
    """Exponential(rate) = Gamma(1, 1/rate)"""

    family = DistributionFamily.exponential

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        FamilyModel.__init__(self, spec, config)
        self.shape = 1.0
        self.scale = 1.0 / spec.param('rate')
