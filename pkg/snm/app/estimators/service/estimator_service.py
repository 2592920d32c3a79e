import math

from functools import lru_cache

import numpy as np

from snm.app.distributions.schema.distribution import DistributionSpec, primary_parameter, resolve_family
from snm.app.distributions.service.distribution_service import distribution_service
from snm.app.estimators.schema.estimator import EstimatorResult, ParetoFit
from snm.app.estimators.utils.bias_grid import BiasGrid, bias_nodes
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.app.statistics.model.named_statistic import gini_statistic, scv_statistic, theil_statistic
from snm.app.statistics.service.statistics_service import statistics_service
from snm.common.dataclasses import SampleData
from snm.common.enums import DistributionFamily, EstimatorMethod, PairNormalization, PopulationStatistic
from snm.common.exception import errors
from snm.common.log import log
from snm.core.conf import settings
from snm.utils.parallel import ordered_map


def _values(data: SampleData | np.ndarray, minimum: int = 2) -> np.ndarray:
    values = data.values if isinstance(data, SampleData) else SampleData(data).values
    if values.size < minimum:
        raise errors.ConfigError(msg=f'Sample size must be at least {minimum}, got {values.size}')
    return values


def _batch(x: np.ndarray, minimum: int = 2) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] < minimum:
        raise errors.ConfigError(msg=f'Expected replications of shape (m, n) with n >= {minimum}, got {x.shape}')
    return x


def _exact_bias(item: tuple[DistributionFamily, float, int, QuadratureConfig | None]) -> float:
    family, param, n, config = item
    return estimator_service.bias_function(family, param, n, config, exact=True)


@lru_cache(maxsize=32)
def get_bias_grid(
    family: DistributionFamily,
    n: int,
    config: QuadratureConfig | None = None,
    workers: int | None = None,
) -> BiasGrid:
    """
    bias(·, n) tabulated on the configured parameter grid, one engine call per node

    :param family: Distribution family, swept over its primary parameter
    :param n: Sample size
    :param config: Quadrature configuration
    :param workers: Worker processes for the node evaluations
    :return:
    """
    nodes = bias_nodes()
    log.info('Tabulating Gini bias of {} at n={} on {} nodes', family.value, n, nodes.size)
    values = ordered_map(_exact_bias, [(family, float(a), n, config) for a in nodes], workers)
    return BiasGrid(nodes, np.array(values))


class EstimatorService:
    """Sample statistics, Pareto fits and bias-corrected Gini estimators"""

    @staticmethod
    def sample_gini(data: SampleData | np.ndarray, r: float = 0.0, *, lorenz: bool = False) -> float:
        """
        Ĝ = Σ_{i≠j}|X_i - X_j| / (2(n - 1) S_n) over the sorted sample, r on the all-zero sample

        :param data: Observations
        :param r: Fallback value
        :param lorenz: Use 2n in place of 2(n - 1)
        :return:
        """
        values = _values(data)
        normalization = PairNormalization.gini_lorenz if lorenz else PairNormalization.gini
        value = float(gini_statistic(r, normalization).ratio(values))
        if value > values.size / (values.size - 1.0):
            log.warning('Sample Gini {} exceeds n/(n-1)', value)
        return value

    @staticmethod
    def sample_gini_batch(x: np.ndarray, r: float = 0.0) -> np.ndarray:
        """Ĝ of every row of an (m, n) array"""
        return gini_statistic(r).ratio(_batch(x))

    @staticmethod
    def sample_scv(data: SampleData | np.ndarray, r: float = 0.0) -> float:
        """
        ĉ_V² = σ̂² / X̄² with the n - 1 sample variance, r on the all-zero sample

        :param data: Observations
        :param r: Fallback value
        :return:
        """
        return float(scv_statistic(r).ratio(_values(data)))

    @staticmethod
    def sample_scv_batch(x: np.ndarray, r: float = 0.0) -> np.ndarray:
        return scv_statistic(r).ratio(_batch(x))

    @staticmethod
    def sample_theil(data: SampleData | np.ndarray, r: float = 0.0) -> float:
        """(1/n) Σ (X_i / X̄) log(X_i / X̄) with 0 log 0 = 0"""
        return float(theil_statistic(r).ratio(_values(data, minimum=1)))

    @staticmethod
    def sample_theil_batch(x: np.ndarray, r: float = 0.0) -> np.ndarray:
        return theil_statistic(r).ratio(_batch(x, minimum=1))

    @staticmethod
    def pareto_fit_mle(data: SampleData | np.ndarray) -> ParetoFit:
        """
        α̂ = n / Σ log X_i for Pareto(α, 1)

        :param data: Observations, all at least 1
        :return:
        """
        values = _values(data, minimum=1)
        if np.any(values < 1.0):
            raise errors.DomainError(
                msg='Pareto(α, 1) fit needs every value >= 1', data={'min': float(values.min())}
            )
        log_sum = float(np.log(values).sum())
        if log_sum == 0:
            raise errors.DegenerateSampleError(msg='Every value equals 1, the MLE of α is undefined')
        return _clamp(values.size / log_sum)

    @staticmethod
    def pareto_fit_mle_batch(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Row-wise MLE over an (m, n) array of Pareto(α, 1) draws

        :param x: Replications
        :return: clamped α̂ and the mask of clamped rows
        """
        x = _batch(x, minimum=1)
        if np.any(x < 1.0):
            raise errors.DomainError(msg='Pareto(α, 1) fit needs every value >= 1')
        log_sum = np.log(x).sum(axis=1)
        if np.any(log_sum == 0):
            raise errors.DegenerateSampleError(msg='A replication has every value equal to 1')
        return _clamp_batch(x.shape[1] / log_sum)

    @staticmethod
    def pareto_fit_mom(data: SampleData | np.ndarray) -> ParetoFit:
        """
        α̂ = X̄ / (X̄ - 1)

        :param data: Observations
        :return:
        """
        mean = float(_values(data, minimum=1).mean())
        if mean <= settings.PARETO_MOM_MIN_MEAN:
            raise errors.DomainError(
                msg=f'Method of moments needs a sample mean above {settings.PARETO_MOM_MIN_MEAN}, got {mean!r}'
            )
        return _clamp(mean / (mean - 1.0))

    @staticmethod
    def pareto_fit_mom_batch(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        mean = _batch(x, minimum=1).mean(axis=1)
        if np.any(mean <= settings.PARETO_MOM_MIN_MEAN):
            raise errors.DomainError(
                msg=f'Method of moments needs every sample mean above {settings.PARETO_MOM_MIN_MEAN}'
            )
        return _clamp_batch(mean / (mean - 1.0))

    @staticmethod
    def plugin_gini(family: DistributionFamily | str, param: float) -> float:
        """
        Population Gini at a fitted primary parameter, 1/(2α - 1) for Pareto(α, 1)

        :param family: Distribution family
        :param param: Primary parameter value
        :return:
        """
        family = resolve_family(family)
        if family == DistributionFamily.pareto:
            return 1.0 / (2.0 * param - 1.0)
        spec = DistributionSpec.create(family, **{primary_parameter(family): param})
        return distribution_service.population_stat(spec, PopulationStatistic.gini)

    @staticmethod
    def bias_function(
        family: DistributionFamily | str,
        param: float,
        n: int,
        config: QuadratureConfig | None = None,
        *,
        exact: bool = False,
        workers: int | None = None,
    ) -> float:
        """
        bias = E Ĝ - G at the given primary parameter

        Without ``exact`` the value is read from the memoized grid of the family at this n.

        :param family: Distribution family
        :param param: Primary parameter value
        :param n: Sample size
        :param config: Quadrature configuration
        :param exact: Evaluate the engine at this parameter
        :param workers: Worker processes used when the grid is built
        :return:
        """
        family = resolve_family(family)
        if not exact:
            return get_bias_grid(family, n, config, workers)(param)
        spec = DistributionSpec.create(family, **{primary_parameter(family): param})
        result = statistics_service.gini_expectation(spec, n, config=config)
        if not result.moment.converged:
            raise errors.EvaluationError(
                msg=f'E Ĝ of {spec.text()} at n={n} did not converge',
                data={'quad_error': result.moment.quadrature_error},
            )
        return result.expected - result.population_G

    @staticmethod
    def debiased_gini(
        data: SampleData | np.ndarray,
        method: EstimatorMethod | str,
        config: QuadratureConfig | None = None,
        *,
        r: float = 0.0,
        bias: BiasGrid | None = None,
    ) -> EstimatorResult:
        """
        Gini estimate corrected through a fitted Pareto(α, 1)

        Debiased methods subtract bias(α̂), plug-in methods return 1/(2α̂ - 1).

        :param data: Observations
        :param method: Estimator
        :param config: Quadrature configuration for the bias grid
        :param r: Fallback value of Ĝ
        :param bias: Bias table, the memoized Pareto grid at this n when omitted
        :return:
        """
        method = EstimatorMethod(method)
        values = _values(data)
        if method == EstimatorMethod.plain:
            return EstimatorResult(method, estimator_service.sample_gini(values, r))
        try:
            if method in (EstimatorMethod.mle_debiased, EstimatorMethod.mle_plugin):
                fit = estimator_service.pareto_fit_mle(values)
            else:
                fit = estimator_service.pareto_fit_mom(values)
        except errors.BaseExceptionError as e:
            raise type(e)(msg=f'{method.value}: {e.msg}', data={**(e.data or {}), 'method': method.value}) from e
        if method in (EstimatorMethod.mle_plugin, EstimatorMethod.mom_plugin):
            value = estimator_service.plugin_gini(DistributionFamily.pareto, fit.alpha)
        else:
            table = bias or get_bias_grid(DistributionFamily.pareto, values.size, config)
            value = estimator_service.sample_gini(values, r) - table(fit.alpha)
        return EstimatorResult(method, value, fit.alpha, fit.clamped)


def _clamp(raw: float) -> ParetoFit:
    floor = settings.PARETO_FIT_FLOOR
    if not (raw > floor and math.isfinite(raw)):
        log.warning('Fitted Pareto shape {} clamped to {}', raw, floor)
        return ParetoFit(raw, floor, True)
    return ParetoFit(raw, raw, False)


def _clamp_batch(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    clamped = ~(raw > settings.PARETO_FIT_FLOOR)
    return np.where(clamped, settings.PARETO_FIT_FLOOR, raw), clamped


estimator_service: EstimatorService = EstimatorService()
