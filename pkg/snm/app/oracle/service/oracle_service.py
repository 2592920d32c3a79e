import itertools
import math

from collections.abc import Sequence

import numpy as np

from scipy import special

from snm.app.distributions.model import get_family_model
from snm.app.distributions.schema.distribution import DistributionSpec, TiltedView
from snm.app.engine.schema.ratio import RatioStatistic
from snm.app.oracle.schema.oracle import EnumerationResult, OracleEstimate
from snm.app.oracle.utils.streams import RunningMoments, chunk_sizes, chunk_streams, merge_all, philox
from snm.app.oracle.utils.tilted_sampler import TiltedSampler
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.common.enums import SupportKind, TiltedMoment
from snm.common.exception import errors
from snm.common.log import log
from snm.core.conf import settings
from snm.utils.parallel import ordered_map

MIN_REPLICATIONS = 1000
MAX_ENUMERATION_SIZE = 12
# truncated mass treated as roundoff when no bound on |V| is known
_NEGLIGIBLE_MASS = 1e-15
_ENUMERATION_CHUNK = 100_000


def _check_replications(replications: int) -> None:
    if replications < MIN_REPLICATIONS:
        raise errors.ConfigError(msg=f'At least {MIN_REPLICATIONS} replications are required, got {replications}')


def _statistic_chunk(task: tuple) -> RunningMoments:
    dists, stat, size, sequence = task
    rng = philox(sequence)
    columns = [get_family_model(dist).sample(size, rng) for dist in dists]
    return RunningMoments.of(stat.ratio(np.stack(columns, axis=-1)))


def _statistic_estimate(
    dists: tuple[DistributionSpec, ...], stat: RatioStatistic, replications: int, seed: int, workers: int | None
) -> OracleEstimate:
    _check_replications(replications)
    sizes = chunk_sizes(replications, settings.ORACLE_BATCH_SIZE)
    tasks = [(dists, stat, size, seq) for size, seq in zip(sizes, chunk_streams(seed, len(sizes)))]
    moments = merge_all(ordered_map(_statistic_chunk, tasks, workers))
    return OracleEstimate(
        moments.mean,
        moments.std_error,
        replications,
        seed,
        moments.variance,
        moments.variance_std_error,
    )


def _cross_moment_chunk(task: tuple) -> RunningMoments:
    view, which, size, sequence, config = task
    sampler = TiltedSampler(get_family_model(view.base, config), view.lam, philox(sequence))
    if which == TiltedMoment.gmd:
        x = sampler.draw((size, 2))
        values = np.abs(x[:, 0] - x[:, 1])
    else:
        x = sampler.draw((size, 3))
        values = np.abs(x[:, 0] - x[:, 1]) * np.abs(x[:, 0] - x[:, 2])
    return RunningMoments.of(values)


class OracleService:
    """Independent ground truth: plain Monte Carlo and exact enumeration"""

    @staticmethod
    def mc_expected_statistic(
        dist: DistributionSpec,
        n: int,
        stat: RatioStatistic,
        replications: int,
        seed: int,
        *,
        workers: int | None = None,
    ) -> OracleEstimate:
        """
        Average of V(X) over replications of n i.i.d. draws

        :param dist: Law of the sample
        :param n: Sample size
        :param stat: Ratio statistic, r is used on all-zero samples
        :param replications: Number of samples, at least 1000
        :param seed: Root seed, each batch gets its own Philox stream
        :param workers: Process pool size
        :return:
        """
        if n < 1:
            raise errors.ConfigError(msg=f'Sample size must be at least 1, got {n}')
        return _statistic_estimate((dist,) * n, stat, replications, seed, workers)

    @staticmethod
    def mc_expected_statistic_independent(
        dists: Sequence[DistributionSpec],
        stat: RatioStatistic,
        replications: int,
        seed: int,
        *,
        workers: int | None = None,
    ) -> OracleEstimate:
        """
        Average of V(X) with coordinate i drawn from ``dists[i]``

        :param dists: One law per coordinate
        :param stat: Ratio statistic
        :param replications: Number of samples, at least 1000
        :param seed: Root seed
        :param workers: Process pool size
        :return:
        """
        if not dists:
            raise errors.ConfigError(msg='At least one distribution is required')
        return _statistic_estimate(tuple(dists), stat, replications, seed, workers)

    @staticmethod
    def enumerate_expected_statistic(
        dist: DistributionSpec,
        n: int,
        stat: RatioStatistic,
        truncation_mass_bound: float = 1e-12,
    ) -> EnumerationResult:
        """
        Exact E V(X) for a discrete law, summing over the support truncated per coordinate

        Omitted joint mass is at most ``truncation_mass_bound`` and contributes at most that mass
        times sup |V|, which is the returned truncation bound.

        :param dist: Discrete law
        :param n: Sample size, at most 12
        :param stat: Ratio statistic
        :param truncation_mass_bound: Allowed omitted joint probability
        :return:
        """
        if dist.support_kind != SupportKind.discrete:
            raise errors.CapabilityError(msg=f'Enumeration needs a discrete law, got {dist.text()}')
        if not 1 <= n <= MAX_ENUMERATION_SIZE:
            raise errors.ConfigError(msg=f'Enumeration supports 1 <= n <= {MAX_ENUMERATION_SIZE}, got {n}')
        if not truncation_mass_bound > 0:
            raise errors.ConfigError(msg='Truncation mass bound must be positive')

        law = get_family_model(dist).base_law
        cum = np.cumsum(law.probs)
        per_coordinate = truncation_mass_bound / n
        size = int(np.searchsorted(cum, 1.0 - per_coordinate, side='left')) + 1
        size = min(size, law.atoms.size)
        atoms, probs = law.atoms[:size], law.probs[:size]
        kept = min(float(probs.sum()), 1.0)
        omitted = max(-math.expm1(n * math.log(kept)), 0.0)

        bound = stat.sup_abs(n)
        if bound is None:
            if omitted > _NEGLIGIBLE_MASS:
                raise errors.EnumerationRefusedError(
                    msg=f'{stat.label()} has no known bound and {omitted:.2e} of the joint mass is truncated',
                    data={'omitted_mass': omitted},
                )
            bound = 0.0

        symmetric = stat.kernel.symmetric
        outcomes = math.comb(size + n - 1, n) if symmetric else size**n
        if outcomes > settings.ENUMERATION_MAX_OUTCOMES:
            raise errors.EnumerationRefusedError(
                msg=f'{outcomes} outcomes exceed the limit {settings.ENUMERATION_MAX_OUTCOMES}',
                data={'outcomes': outcomes},
            )

        log_probs = np.log(probs)
        if symmetric:
            rows = itertools.combinations_with_replacement(range(size), n)
        else:
            rows = itertools.product(range(size), repeat=n)
        value = 0.0
        while block := list(itertools.islice(rows, _ENUMERATION_CHUNK)):
            index = np.asarray(block, dtype=int).reshape(-1, n)
            log_weight = log_probs[index].sum(axis=1)
            if symmetric:
                # multinomial count of the orderings of each multiset
                counts = (index[:, :, None] == np.arange(size)).sum(axis=1)
                log_weight += special.gammaln(n + 1.0) - special.gammaln(counts + 1.0).sum(axis=1)
            value += float(np.exp(log_weight) @ stat.ratio(atoms[index]))
        return EnumerationResult(value, omitted * bound, omitted, outcomes)

    @staticmethod
    def mc_tilted_cross_moment(
        view: TiltedView,
        which: TiltedMoment | str,
        samples: int,
        seed: int,
        config: QuadratureConfig | None = None,
        *,
        workers: int | None = None,
    ) -> OracleEstimate:
        """
        Monte Carlo GMD = E|X1 - X2| or ξ1 = E|X1 - X2||X1 - X3| under F^(λ)

        :param view: Base law and tilt
        :param which: gmd or xi1
        :param samples: Number of pairs or triples
        :param seed: Root seed
        :param config: Quadrature configuration of the tilted law, used by the inverse-CDF path
        :param workers: Process pool size
        :return:
        """
        which = TiltedMoment(which)
        if which not in (TiltedMoment.gmd, TiltedMoment.xi1):
            raise errors.ConfigError(msg=f'Cross moment must be gmd or xi1, got {which.value}')
        _check_replications(samples)
        config = config or QuadratureConfig()
        model = get_family_model(view.base, config)
        model.check_finite('tilted mean', model.tilted_mean(view.lam))
        if which == TiltedMoment.xi1:
            model.check_finite('tilted variance (needed by xi1)', model.tilted_variance(view.lam))
        sizes = chunk_sizes(samples, settings.ORACLE_BATCH_SIZE)
        tasks = [(view, which, size, seq, config) for size, seq in zip(sizes, chunk_streams(seed, len(sizes)))]
        moments = merge_all(ordered_map(_cross_moment_chunk, tasks, workers))
        log.debug('Tilted {} of {} at λ={:g}: {:.6g}', which.value, view.base.text(), view.lam, moments.mean)
        return OracleEstimate(
            moments.mean,
            moments.std_error,
            samples,
            seed,
            moments.variance,
            moments.variance_std_error,
        )


oracle_service: OracleService = OracleService()
