from functools import lru_cache

import numpy as np

from scipy import integrate, special

from snm.app.distributions.model.base import FamilyModel
from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.common.enums import DistributionFamily
from snm.core.conf import settings


class TiltedLognormal:
    """
    Lognormal(μ, σ) tilted by e^(-λx), represented on a uniform grid in z = (log x - μ)/σ

    The grid is centred where λx = 1 when that point lies in the lower tail, so heavy tilts
    keep their mass on the grid.
    """

    def __init__(self, mu: float, sigma: float, lam: float, points: int, half_width: float) -> None:
        self.mu = mu
        self.sigma = sigma
        self.lam = lam
        z_hi = half_width
        z_lo = -half_width
        if lam > 0:
            z_unit = (-np.log(lam) - mu) / sigma
            z_lo = min(-half_width, z_unit - half_width)
            z_hi = min(half_width, max(z_unit + 8.0 / sigma, z_lo + 1.0))
        self.z = np.linspace(z_lo, z_hi, points)
        self.x = np.exp(mu + sigma * self.z)
        log_w = -lam * self.x - 0.5 * self.z**2 - 0.5 * np.log(2 * np.pi)
        peak = log_w.max()
        weights = np.exp(log_w - peak)
        total = integrate.trapezoid(weights, self.z)
        self.log_laplace = float(peak + np.log(total))
        self.density = weights / total
        cum = integrate.cumulative_simpson(self.density, x=self.z, initial=0.0)
        cum = np.maximum.accumulate(np.clip(cum, 0.0, None))
        self.cum = cum / cum[-1]

    def support(self) -> tuple[float, float]:
        return 0.0, np.inf

    def expect(self, func) -> float:
        return float(integrate.trapezoid(np.asarray(func(self.x), dtype=float) * self.density, self.z))

    def moment(self, order: int) -> float:
        return self.expect(lambda x: x**order)

    def mean(self) -> float:
        return self.moment(1)

    def var(self) -> float:
        mean = self.mean()
        return self.expect(lambda x: (x - mean) ** 2)

    def _z_of(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide='ignore'):
            return (np.log(x) - self.mu) / self.sigma

    def cdf(self, x: np.ndarray | float) -> np.ndarray:
        return np.interp(self._z_of(x), self.z, self.cum, left=0.0, right=1.0)

    def sf(self, x: np.ndarray | float) -> np.ndarray:
        return 1.0 - self.cdf(x)

    def ppf(self, q: np.ndarray | float) -> np.ndarray:
        z = np.interp(np.asarray(q, dtype=float), self.cum, self.z)
        return np.exp(self.mu + self.sigma * z)

    def gmd(self) -> float:
        # 2 ∫ F(1 - F) dx with dx = σ x dz
        return float(2.0 * integrate.trapezoid(self.cum * (1.0 - self.cum) * self.sigma * self.x, self.z))


@lru_cache(maxsize=256)
def _tilted_lognormal(mu: float, sigma: float, lam: float, points: int, half_width: float) -> TiltedLognormal:
    return TiltedLognormal(mu, sigma, lam, points, half_width)


class LognormalModel(FamilyModel):
    """Lognormal(μ, σ): log X ~ Normal(μ, σ²)"""

    family = DistributionFamily.lognormal

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        super().__init__(spec, config)
        self.mu = spec.param('mu')
        self.sigma = spec.param('sigma')

    def _grid(self, lam: float) -> TiltedLognormal:
        return _tilted_lognormal(
            self.mu, self.sigma, float(lam), settings.LOGNORMAL_GRID_POINTS, settings.LOGNORMAL_GRID_HALF_WIDTH
        )

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        flat = np.array([0.0 if v == 0 else self._grid(v).log_laplace for v in lam.reshape(-1)])
        return flat.reshape(lam.shape)

    def zero_mass(self) -> float:
        return 0.0

    def build_tilted_law(self, lam: float) -> TiltedLognormal:
        return self._grid(lam)

    def tilted_law(self, lam: float) -> TiltedLognormal:
        # grids are large, the bounded module cache replaces the per-model memo
        return self._grid(lam)

    def mean(self) -> float:
        return float(np.exp(self.mu + 0.5 * self.sigma**2))

    def variance(self) -> float:
        return float(np.expm1(self.sigma**2) * np.exp(2 * self.mu + self.sigma**2))

    def gmd(self) -> float:
        return float(2.0 * self.mean() * special.erf(self.sigma / 2.0))

    def theil(self) -> float:
        return 0.5 * self.sigma**2

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return rng.lognormal(self.mu, self.sigma, size=size)
