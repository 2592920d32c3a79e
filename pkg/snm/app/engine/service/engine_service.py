from collections.abc import Iterable, Sequence

import numpy as np

from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.engine.model.kernel import CoordinateKernel, SumPowerKernel, TiltedValue
from snm.app.engine.model.product import ProductLaw
from snm.app.engine.schema.ratio import MomentResult, RatioStatistic, SanityCase, SanityReport
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.app.quadrature.service.quadrature_service import quadrature_service
from snm.common.exception import errors
from snm.common.log import log
from snm.core.conf import settings


def _stack(values: list[TiltedValue]) -> np.ndarray:
    arrays = [np.asarray(v, dtype=float) for v in values]
    shape = np.broadcast_shapes(*(a.shape for a in arrays))
    return np.stack([np.broadcast_to(a, shape) for a in arrays])


def _tilted_factor(product: ProductLaw, stat: RatioStatistic):
    """λ ↦ E_λ[T] on node arrays, shape (m,) or (m, R)"""
    kernel = stat.kernel
    degree = kernel.homogeneity
    if degree is not None and product.scale_key is not None:
        # F_a^(λ)(x) = F_a(x / s(λ)) for every group, so E_λ[T] = s(λ)^d E_0[T]
        base = np.asarray(kernel.tilted_expectation(product, 0.0), dtype=float)

        def scaled(lam: np.ndarray) -> np.ndarray:
            factor = product.tilted_scale(lam) ** degree
            return np.multiply.outer(factor, base) if base.ndim else factor * base

        return scaled

    def generic(lam: np.ndarray) -> np.ndarray:
        return _stack([kernel.tilted_expectation(product, float(v)) for v in lam])

    return generic


class EngineService:
    """Expected self-normalized ratios as one λ-integral plus the all-zero atom"""

    @staticmethod
    def expected_ratio(product: ProductLaw, stat: RatioStatistic, config: QuadratureConfig) -> MomentResult:
        """
        E[T(X) / S_n^α] = (1/Γ(α)) ∫ λ^(α-1) ∏ L_i(λ) E_λ[T] dλ + r ∏ P(X_i = 0)

        :param product: Law of the sample
        :param stat: Ratio statistic
        :param config: Quadrature configuration
        :return:
        """
        stat.kernel.check(product)
        tilted = _tilted_factor(product, stat)

        def integrand(lam: np.ndarray) -> np.ndarray:
            weight = np.exp(product.log_laplace(lam))
            inner = tilted(lam)
            # Lⁿ underflow wins over any growth of the tilted factor
            inner = np.where((weight == 0)[(...,) + (None,) * (inner.ndim - 1)], 0.0, inner)
            return inner * (weight if inner.ndim == 1 else weight[:, None])

        mean_sum = product.mean_sum()
        scale = 1.0 / mean_sum if mean_sum > 0 and np.isfinite(mean_sum) else 1.0
        outer = config.partitioned(settings.ENGINE_INITIAL_INTERVALS)
        integral = quadrature_service.integrate_with_power_weight(integrand, stat.power, outer, scale=scale)
        atom = stat.fallback_r * product.zero_mass()
        # inner integrals bound E_λ[T] to a relative error, which carries over to the λ-integral
        accuracy = product.inner_accuracy()
        error = integral.error_estimate + accuracy.relative_error * abs(integral.value)
        converged = integral.converged and accuracy.converged

        inner_std_error = None
        if integral.components:
            components = np.asarray(integral.components)
            inner_std_error = float(components.std(ddof=1) / np.sqrt(components.size))
        if not integral.converged:
            log.warning(
                'Engine integral for {} under {} did not converge, error {:.3e}',
                stat.label(),
                product.describe(),
                integral.error_estimate,
            )
        if not accuracy.converged:
            log.warning(
                'Inner integrals for {} under {} did not converge, worst relative error {:.3e}',
                stat.label(),
                product.describe(),
                accuracy.relative_error,
            )
        return MomentResult(
            value=integral.value + atom,
            quadrature_error=error,
            atom_term=atom,
            converged=converged,
            evaluations=integral.evaluations,
            subdivisions_used=integral.subdivisions_used,
            inner_std_error=inner_std_error,
        )

    @staticmethod
    def expected_ratio_iid(
        dist: DistributionSpec,
        n: int,
        stat: RatioStatistic,
        config: QuadratureConfig | None = None,
    ) -> MomentResult:
        """
        Expected ratio for an i.i.d. sample of size n

        :param dist: Common law
        :param n: Sample size
        :param stat: Ratio statistic
        :param config: Quadrature configuration
        :return:
        """
        config = config or QuadratureConfig()
        return EngineService.expected_ratio(ProductLaw.iid(dist, n, config), stat, config)

    @staticmethod
    def expected_ratio_independent(
        dists: Sequence[DistributionSpec],
        stat: RatioStatistic,
        config: QuadratureConfig | None = None,
    ) -> MomentResult:
        """
        Expected ratio for independent, not necessarily identical coordinates

        Repeated laws are grouped, so pairwise kernels cost O(m²) in the number of distinct laws.

        :param dists: One law per coordinate
        :param stat: Ratio statistic
        :param config: Quadrature configuration
        :return:
        """
        config = config or QuadratureConfig()
        return EngineService.expected_ratio(ProductLaw.independent(list(dists), config), stat, config)

    @staticmethod
    def sanity_identity_suite(
        dist: DistributionSpec,
        n: int,
        powers: Iterable[int] = (1, 2, 3),
        *,
        r: float = 0.0,
        tolerance: float = 1e-9,
        config: QuadratureConfig | None = None,
    ) -> SanityReport:
        """
        Run T = S_n^k with α = k, and T = X_1 with α = 1, against their exact values

        E[S^k / S^k] = 1 - P0 + r P0 and E[X_1 / S] = (1 - P0) / n + r P0, with P0 = P(S_n = 0).

        :param dist: Law of the i.i.d. sample
        :param n: Sample size
        :param powers: Values of k, each in {1, 2, 3}
        :param r: Fallback value
        :param tolerance: Allowed absolute deviation besides the quadrature error
        :param config: Quadrature configuration
        :return:
        """
        config = config or QuadratureConfig()
        product = ProductLaw.iid(dist, n, config)
        p0 = product.zero_mass()
        cases = []
        for k in powers:
            if k not in (1, 2, 3):
                raise errors.ConfigError(msg=f'Identity power must be 1, 2 or 3, got {k}')
            result = EngineService.expected_ratio(product, RatioStatistic(SumPowerKernel(k), float(k), r), config)
            cases.append(SanityCase(f'S^{k}/S^{k}', 1.0 - p0 + r * p0, result.value, result.quadrature_error, tolerance))
        result = EngineService.expected_ratio(product, RatioStatistic(CoordinateKernel(0), 1.0, r), config)
        cases.append(SanityCase('X1/S', (1.0 - p0) / n + r * p0, result.value, result.quadrature_error, tolerance))
        report = SanityReport(dist.text(), n, tuple(cases))
        if not report.passed:
            log.warning('Identity checks failed for {} at n={}', dist.text(), n)
        return report


engine_service: EngineService = EngineService()
