import numpy as np

from scipy import stats

from snm.app.distributions.model.base import FamilyModel
from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.distributions.utils.law import DiscreteLaw
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.common.enums import DistributionFamily, SupportKind
from snm.core.conf import settings


class PoissonModel(FamilyModel):
    """Poisson(μ), tilted law Poisson(μ e^(-λ))"""

    family = DistributionFamily.poisson
    support_kind = SupportKind.discrete

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        super().__init__(spec, config)
        self.mu = spec.param('mu')

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        return self.mu * np.expm1(-np.asarray(lam, dtype=float))

    def zero_mass(self) -> float:
        return float(np.exp(-self.mu))

    def tilted_mu(self, lam: float) -> float:
        return self.mu * float(np.exp(-lam))

    def build_tilted_law(self, lam: float) -> DiscreteLaw:
        mu = self.tilted_mu(lam)
        if mu == 0:
            return DiscreteLaw.point(0.0)
        return DiscreteLaw.from_frozen(stats.poisson(mu), settings.DISCRETE_TAIL_MASS)

    def tilted_mean(self, lam: float) -> float:
        return self.tilted_mu(lam)

    def tilted_variance(self, lam: float) -> float:
        return self.tilted_mu(lam)

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return rng.poisson(self.mu, size=size).astype(float)


class BernoulliModel(FamilyModel):
    """Bernoulli(p), tilted law Bernoulli(p e^(-λ) / (1 - p + p e^(-λ)))"""

    family = DistributionFamily.bernoulli
    support_kind = SupportKind.discrete

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        super().__init__(spec, config)
        self.p = spec.param('p')

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        return np.log1p(self.p * np.expm1(-np.asarray(lam, dtype=float)))

    def zero_mass(self) -> float:
        return 1.0 - self.p

    def tilted_p(self, lam: float) -> float:
        weighted = self.p * np.exp(-lam)
        return float(weighted / (1.0 - self.p + weighted))

    def build_tilted_law(self, lam: float) -> DiscreteLaw:
        q = self.tilted_p(lam)
        if q == 1.0:
            return DiscreteLaw.point(1.0)
        return DiscreteLaw(np.array([0.0, 1.0]), np.array([1.0 - q, q]))

    def tilted_gmd(self, lam: float) -> float:
        q = self.tilted_p(lam)
        return 2.0 * q * (1.0 - q)

    def theil(self) -> float:
        return float(-np.log(self.p))

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return rng.binomial(1, self.p, size=size).astype(float)


class NegativeBinomialModel(FamilyModel):
    """NegativeBinomial(k, p) counting failures, tilted law NB(k, 1 - (1 - p) e^(-λ))"""

    family = DistributionFamily.negative_binomial
    support_kind = SupportKind.discrete

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        super().__init__(spec, config)
        self.k = spec.param('k')
        self.p = spec.param('p')

    def tilted_p(self, lam: float) -> float:
        return float(1.0 - (1.0 - self.p) * np.exp(-lam))

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        q = (1.0 - self.p) * np.exp(-np.asarray(lam, dtype=float))
        return self.k * (np.log(self.p) - np.log1p(-q))

    def zero_mass(self) -> float:
        return float(self.p**self.k)

    def build_tilted_law(self, lam: float) -> DiscreteLaw:
        return DiscreteLaw.from_frozen(stats.nbinom(self.k, self.tilted_p(lam)), settings.DISCRETE_TAIL_MASS)

    def tilted_mean(self, lam: float) -> float:
        p = self.tilted_p(lam)
        return self.k * (1.0 - p) / p

    def tilted_variance(self, lam: float) -> float:
        p = self.tilted_p(lam)
        return self.k * (1.0 - p) / p**2

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return rng.negative_binomial(self.k, self.p, size=size).astype(float)


class PointMassModel(FamilyModel):
    """Degenerate law at c >= 0, unchanged by tilting"""

    family = DistributionFamily.pointmass
    support_kind = SupportKind.discrete

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        super().__init__(spec, config)
        self.value = spec.param('value')

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        return -self.value * np.asarray(lam, dtype=float)

    def zero_mass(self) -> float:
        return 1.0 if self.value == 0 else 0.0

    def tilted_scale(self, lam: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(lam, dtype=float))

    @property
    def scale_key(self) -> tuple:
        return 'fixed', self.value

    def build_tilted_law(self, lam: float) -> DiscreteLaw:
        return DiscreteLaw.point(self.value)

    def theil(self) -> float:
        return 0.0

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return np.full(size, self.value, dtype=float)
