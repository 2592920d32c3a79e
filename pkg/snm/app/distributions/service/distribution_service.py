from collections.abc import Iterable

import numpy as np

from snm.app.distributions.model import FamilyModel, get_family_model
from snm.app.distributions.schema.distribution import DistributionSpec, TiltedMomentSet, TiltedView
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.common.dataclasses import SampleData
from snm.common.enums import PopulationStatistic, TiltedMoment
from snm.common.exception import errors


def _check_lambda(lam: np.ndarray | float) -> np.ndarray:
    values = np.asarray(lam, dtype=float)
    if np.any(~(values >= 0)) or np.any(~np.isfinite(values)):
        raise errors.DomainError(msg=f'Laplace transform needs finite lambda >= 0, got {lam!r}')
    return values


class DistributionService:
    """Laplace transforms, atoms and tilted moments of the distribution catalog"""

    @staticmethod
    def model(dist: DistributionSpec, config: QuadratureConfig | None = None) -> FamilyModel:
        return get_family_model(dist, config)

    @staticmethod
    def laplace(dist: DistributionSpec, lam: np.ndarray | float) -> np.ndarray | float:
        """
        Laplace transform E[e^(-λX)]

        :param dist: Distribution
        :param lam: λ >= 0, scalar or array
        :return:
        """
        values = _check_lambda(lam)
        result = get_family_model(dist).laplace(values)
        return float(result) if np.ndim(lam) == 0 else result

    @staticmethod
    def log_laplace(dist: DistributionSpec, lam: np.ndarray | float) -> np.ndarray:
        return get_family_model(dist).log_laplace(_check_lambda(lam))

    @staticmethod
    def zero_mass(dist: DistributionSpec) -> float:
        """
        Atom at zero P(X = 0)

        :param dist: Distribution
        :return:
        """
        return get_family_model(dist).zero_mass()

    @staticmethod
    def tilted_moments(
        view: TiltedView,
        which: Iterable[TiltedMoment | str],
        config: QuadratureConfig | None = None,
    ) -> TiltedMomentSet:
        """
        Moments of the tilted law F^(λ)

        Requesting ``gmd`` also fills ``xi0`` and requesting ``variance`` also fills ``xi2``.

        :param view: Base distribution and tilt
        :param which: Subset of mean, variance, gmd, xi1
        :param config: Quadrature configuration for numeric paths
        :return:
        """
        model = get_family_model(view.base, config)
        lam = view.lam
        requested = {TiltedMoment(m) for m in which}
        values: dict[str, float] = {}

        if TiltedMoment.mean in requested:
            values['mean'] = model.check_finite('mean', model.tilted_mean(lam))
        if TiltedMoment.variance in requested:
            variance = model.check_finite('variance', model.tilted_variance(lam))
            values['variance'] = variance
            values['xi2'] = 2.0 * variance
        if TiltedMoment.gmd in requested:
            gmd = model.check_finite('gmd', model.tilted_gmd(lam))
            values['gmd'] = gmd
            values['xi0'] = gmd * gmd
        if TiltedMoment.xi1 in requested:
            model.check_finite('xi1 (needs a finite variance)', model.tilted_variance(lam))
            estimate = model.tilted_xi1(lam)
            values['xi1'] = estimate.value
            values['xi1_std_error'] = estimate.std_error
        return TiltedMomentSet(**values)

    @staticmethod
    def gmd_scaling_g(dist: DistributionSpec, lam: float, config: QuadratureConfig | None = None) -> float:
        """
        g(λ) = GMD(F^(λ)) / GMD(F)

        :param dist: Distribution with positive GMD
        :param lam: λ >= 0
        :param config: Quadrature configuration
        :return:
        """
        _check_lambda(lam)
        model = get_family_model(dist, config)
        base = model.gmd()
        if not base > 0:
            raise errors.DomainError(msg=f'GMD of {dist.text()} is zero, g(λ) is undefined')
        scale = model.tilted_scale(np.array([lam], dtype=float))
        if scale is not None:
            return float(scale[0])
        return model.tilted_gmd(lam) / base

    @staticmethod
    def population_stat(dist: DistributionSpec, stat: PopulationStatistic | str) -> float:
        """
        Population Gini, squared coefficient of variation or Theil index

        :param dist: Distribution
        :param stat: gini, scv or theil
        :return:
        """
        model = get_family_model(dist)
        mean = model.mean()
        match PopulationStatistic(stat):
            case PopulationStatistic.gini:
                return 0.0 if mean == 0 else model.check_finite('gmd', model.gmd()) / (2.0 * mean)
            case PopulationStatistic.scv:
                variance = model.check_finite('variance', model.variance())
                return 0.0 if mean == 0 else variance / mean**2
            case PopulationStatistic.theil:
                return model.check_finite('E[X log X]', model.theil())

    @staticmethod
    def sample(dist: DistributionSpec, n: int, seed: int) -> SampleData:
        """
        n i.i.d. draws, deterministic per seed

        :param dist: Distribution
        :param n: Sample size
        :param seed: Seed of a Philox stream
        :return:
        """
        if n < 1:
            raise errors.ConfigError(msg=f'Sample size must be at least 1, got {n}')
        rng = np.random.Generator(np.random.Philox(seed))
        return SampleData(get_family_model(dist).sample(n, rng))


distribution_service: DistributionService = DistributionService()
