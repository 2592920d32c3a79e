import numpy as np

from snm.app.distributions.model.base import FamilyModel
from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.app.quadrature.service.quadrature_service import quadrature_service
from snm.common.enums import DistributionFamily
from snm.core.conf import settings
from snm.utils.special import upper_gamma_scaled


class TiltedPareto:
    """
    Pareto(α, x_m) tilted by e^(-λx)

    With z = λx and Q(s, z) = e^z z^(-s) Γ(s, z):
    S(x) = (x/x_m)^(-α) e^(-λ(x - x_m)) Q(-α, λx) / Q(-α, λx_m) and
    E X^j = x_m^j Q(j - α, λx_m) / Q(-α, λx_m).
    """

    def __init__(self, alpha: float, xm: float, lam: float, config: QuadratureConfig) -> None:
        self.alpha = alpha
        self.xm = xm
        self.lam = lam
        self.config = config
        self._z0 = xm * lam
        self._q0 = float(upper_gamma_scaled(-alpha, self._z0))

    @property
    def heavy_tail(self) -> bool:
        # the power tail outlives e^(-λx) over the first scale lengths
        return self._z0 < 1.0

    def support(self) -> tuple[float, float]:
        return self.xm, np.inf

    def sf(self, x: np.ndarray | float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        above = x > self.xm
        xa = x[above]
        ratio = upper_gamma_scaled(-self.alpha, self.lam * xa) / self._q0
        out[above] = (xa / self.xm) ** -self.alpha * np.exp(-self.lam * (xa - self.xm)) * ratio
        return out

    def cdf(self, x: np.ndarray | float) -> np.ndarray:
        return 1.0 - self.sf(x)

    def pdf(self, x: np.ndarray | float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        safe = np.where(x >= self.xm, x, self.xm)
        density = self.xm**self.alpha * safe ** (-self.alpha - 1.0) * np.exp(-self.lam * (safe - self.xm)) / self._q0
        return np.where(x >= self.xm, density, 0.0)

    def moment(self, order: int) -> float:
        if order == 0:
            return 1.0
        return float(self.xm**order * upper_gamma_scaled(order - self.alpha, self._z0) / self._q0)

    def mean(self) -> float:
        return self.moment(1)

    def var(self) -> float:
        second = self.moment(2)
        if not np.isfinite(second):
            return np.inf
        return max(second - self.mean() ** 2, 0.0)

    def ppf(self, q: np.ndarray | float) -> np.ndarray:
        # tilting makes the law stochastically smaller, so the base quantile bounds from above
        q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0 - 1e-16)
        lo = np.full_like(q, np.log(self.xm))
        hi = np.log(self.xm) - np.log1p(-q) / self.alpha
        if self.lam == 0:
            return np.exp(hi)
        for _ in range(settings.PARETO_PPF_ITERATIONS):
            mid = 0.5 * (lo + hi)
            below = self.cdf(np.exp(mid)) < q
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return np.exp(0.5 * (lo + hi))

    def expect(self, func) -> float:
        result = quadrature_service.integrate_semi_infinite(
            lambda y: np.asarray(func(self.xm + y), dtype=float) * self.pdf(self.xm + y),
            self.config,
            scale=self.xm,
        )
        return result.value


class ParetoModel(FamilyModel):
    """Pareto(α, x_m) with density α x_m^α x^(-α-1) on [x_m, inf)"""

    family = DistributionFamily.pareto

    def __init__(self, spec: DistributionSpec, config: QuadratureConfig) -> None:
        super().__init__(spec, config)
        self.alpha = spec.param('shape')
        self.xm = spec.param('scale')

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        # α x_m^α λ^α Γ(-α, x_m λ) = α e^(-z) Q(-α, z)
        z = self.xm * np.asarray(lam, dtype=float)
        return np.log(self.alpha) - z + np.log(upper_gamma_scaled(-self.alpha, z))

    def zero_mass(self) -> float:
        return 0.0

    def build_tilted_law(self, lam: float) -> TiltedPareto:
        return TiltedPareto(self.alpha, self.xm, lam, self.config)

    def tilted_gmd(self, lam: float) -> float:
        if lam == 0:
            # 2 μ G with G = 1/(2α - 1)
            return 2.0 * self.mean() / (2.0 * self.alpha - 1.0)
        return super().tilted_gmd(lam)

    def expect_x_log_x(self) -> float:
        a, xm = self.alpha, self.xm
        return xm * (np.log(xm) * a / (a - 1.0) + a / (a - 1.0) ** 2)

    def theil(self) -> float:
        a = self.alpha
        return float(1.0 / (a - 1.0) - np.log(a / (a - 1.0)))

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        return self.xm * (1.0 + rng.pareto(self.alpha, size=size))
