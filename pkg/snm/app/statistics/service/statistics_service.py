from functools import lru_cache

import numpy as np

from snm.app.distributions.schema.distribution import DistributionSpec, TiltedView
from snm.app.distributions.service.distribution_service import distribution_service
from snm.app.engine.service.engine_service import engine_service
from snm.app.oracle.schema.oracle import OracleEstimate
from snm.app.oracle.service.oracle_service import oracle_service
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.app.statistics.model.named_statistic import (
    gini_squared_statistic,
    gini_statistic,
    scv_statistic,
    theil_statistic,
)
from snm.app.statistics.schema.moments import (
    GiniExpectation,
    GiniMomentReport,
    GiniSecondMoment,
    ScvExpectation,
    ScvMomentReport,
    TheilExpectation,
    TheilMomentReport,
)
from snm.app.statistics.utils.closed_form import gamma_gini_variance
from snm.common.enums import PopulationStatistic, TiltedMoment
from snm.common.exception import errors
from snm.common.log import log
from snm.core.conf import settings


def _check_n(n: int) -> None:
    if n < 2:
        raise errors.ConfigError(msg=f'Sample size must be at least 2, got {n}')


@lru_cache(maxsize=64)
def _xi1_reference(dist: DistributionSpec, samples: int, seed: int) -> OracleEstimate:
    log.info('Estimating ξ1 of {} from {} triples', dist.text(), samples)
    return oracle_service.mc_tilted_cross_moment(TiltedView(dist, 0.0), TiltedMoment.xi1, samples, seed)


class StatisticsService:
    """Moments of the sample Gini coefficient, squared coefficient of variation and Theil index"""

    @staticmethod
    def gini_expectation(
        dist: DistributionSpec,
        n: int,
        r: float = 0.0,
        config: QuadratureConfig | None = None,
    ) -> GiniExpectation:
        """
        E Ĝ and the bias ratio R = E Ĝ / G

        Scale families go through g(λ) = GMD(F^(λ)) / GMD(F), others through the tilted GMD at every node.

        :param dist: Law of the i.i.d. sample
        :param n: Sample size, at least 2
        :param r: Value of Ĝ on the all-zero sample
        :param config: Quadrature configuration
        :return:
        """
        _check_n(n)
        population = distribution_service.population_stat(dist, PopulationStatistic.gini)
        moment = engine_service.expected_ratio_iid(dist, n, gini_statistic(r), config)
        ratio = moment.value / population if population > 0 else None
        return GiniExpectation(moment.value, ratio, population, moment)

    @staticmethod
    def gini_second_moment(
        dist: DistributionSpec,
        n: int,
        r: float = 0.0,
        config: QuadratureConfig | None = None,
    ) -> GiniSecondMoment:
        """
        E Ĝ² and Var Ĝ

        :param dist: Law of the i.i.d. sample, with finite variance
        :param n: Sample size, at least 2
        :param r: Value of Ĝ on the all-zero sample
        :param config: Quadrature configuration
        :return:
        """
        _check_n(n)
        config = config or QuadratureConfig()
        model = distribution_service.model(dist, config)
        if not np.isfinite(model.variance()):
            raise errors.CapabilityError(
                msg=f'ξ2 = 2 Var(X) is infinite for {dist.text()}, the second moment of Ĝ needs it',
                data={'moment': 'xi2', 'distribution': dist.text()},
            )
        first = StatisticsService.gini_expectation(dist, n, r, config)
        moment = engine_service.expected_ratio_iid(dist, n, gini_squared_statistic(r), config)
        variance = moment.value - first.expected**2
        if variance < 0:
            slack = moment.total_error + 2.0 * abs(first.expected) * first.moment.total_error
            if -variance > slack:
                log.warning('Negative Var Ĝ {:.3e} for {} at n={} beyond error {:.3e}', variance, dist.text(), n, slack)
            else:
                variance = 0.0
        return GiniSecondMoment(moment.value, variance, first.expected, moment)

    @staticmethod
    def scv_expectation(
        dist: DistributionSpec,
        n: int,
        r: float = 0.0,
        config: QuadratureConfig | None = None,
    ) -> ScvExpectation:
        """
        E ĉ_V² and R_V = E ĉ_V² / c_V²

        :param dist: Law of the i.i.d. sample, with finite variance
        :param n: Sample size, at least 2
        :param r: Value of ĉ_V² on the all-zero sample
        :param config: Quadrature configuration
        :return:
        """
        _check_n(n)
        population = distribution_service.population_stat(dist, PopulationStatistic.scv)
        moment = engine_service.expected_ratio_iid(dist, n, scv_statistic(r), config)
        ratio = moment.value / population if population > 0 else None
        return ScvExpectation(moment.value, ratio, population, moment)

    @staticmethod
    def theil_expectation(
        dist: DistributionSpec,
        n: int,
        r: float = 0.0,
        config: QuadratureConfig | None = None,
    ) -> TheilExpectation:
        """
        Expected sample Theil index, with the quasi-Monte Carlo error of the inner expectation

        :param dist: Law of the i.i.d. sample
        :param n: Sample size
        :param r: Value on the all-zero sample
        :param config: Quadrature configuration
        :return:
        """
        if n < 1:
            raise errors.ConfigError(msg=f'Sample size must be at least 1, got {n}')
        population = distribution_service.population_stat(dist, PopulationStatistic.theil)
        moment = engine_service.expected_ratio_iid(dist, n, theil_statistic(r), config)
        return TheilExpectation(moment.value, moment.inner_std_error or 0.0, population, moment)

    @staticmethod
    def gini_report(
        dist: DistributionSpec,
        n: int,
        r: float = 0.0,
        config: QuadratureConfig | None = None,
        *,
        second_moment: bool = True,
    ) -> GiniMomentReport:
        first = StatisticsService.gini_expectation(dist, n, r, config)
        fields = {}
        if second_moment:
            second = StatisticsService.gini_second_moment(dist, n, r, config)
            fields = {
                'second_moment': second.second_moment,
                'variance': second.variance,
                'inner_std_error': second.moment.inner_std_error,
            }
        return GiniMomentReport(
            distribution=dist.text(),
            n=n,
            r=r,
            population_G=first.population_G,
            expected=first.expected,
            ratio_R=first.ratio_R,
            quad_error=first.moment.quadrature_error,
            converged=first.moment.converged,
            **fields,
        )

    @staticmethod
    def scv_report(
        dist: DistributionSpec, n: int, r: float = 0.0, config: QuadratureConfig | None = None
    ) -> ScvMomentReport:
        result = StatisticsService.scv_expectation(dist, n, r, config)
        return ScvMomentReport(
            distribution=dist.text(),
            n=n,
            r=r,
            population_cv2=result.population_cv2,
            expected=result.expected,
            ratio_RV=result.ratio_RV,
            quad_error=result.moment.quadrature_error,
            converged=result.moment.converged,
        )

    @staticmethod
    def theil_report(
        dist: DistributionSpec, n: int, r: float = 0.0, config: QuadratureConfig | None = None
    ) -> TheilMomentReport:
        result = StatisticsService.theil_expectation(dist, n, r, config)
        return TheilMomentReport(
            distribution=dist.text(),
            n=n,
            r=r,
            population_T=result.population_T,
            expected=result.expected,
            inner_std_error=result.std_error,
            quad_error=result.moment.quadrature_error,
            converged=result.moment.converged,
        )

    @staticmethod
    def xi1_reference(dist: DistributionSpec, samples: int | None = None, seed: int | None = None) -> OracleEstimate:
        """
        Monte Carlo ξ1 = E|X1 - X2||X1 - X3| of the base law, cached per (law, samples, seed)

        :param dist: Distribution
        :param samples: Number of triples
        :param seed: Oracle seed
        :return:
        """
        samples = samples or settings.XI1_REFERENCE_SAMPLES
        seed = settings.XI1_REFERENCE_SEED if seed is None else seed
        return _xi1_reference(dist, samples, seed)

    @staticmethod
    def gamma_gini_variance(shape: float, n: int, xi1: float | None = None) -> float:
        """
        Closed-form Var Ĝ for Gamma(α, 1), with the reference ξ1 when none is given

        :param shape: α
        :param n: Sample size
        :param xi1: ξ1 of Gamma(α, 1)
        :return:
        """
        if xi1 is None and n > 2:
            xi1 = StatisticsService.xi1_reference(DistributionSpec.create('gamma', shape=shape, scale=1.0)).mean
        return gamma_gini_variance(shape, n, xi1 or 0.0)


statistics_service: StatisticsService = StatisticsService()
