import dataclasses
import itertools
import math

from collections.abc import Callable

import numpy as np

from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.engine.service.engine_service import engine_service
from snm.app.experiment.schema.experiment import ExperimentConfig, ValidationCheck, ValidationReport
from snm.app.experiment.service.experiment_service import experiment_service
from snm.app.oracle.service.oracle_service import oracle_service
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.app.quadrature.service.quadrature_service import quadrature_service
from snm.app.statistics.model.named_statistic import gini_statistic, scv_statistic
from snm.app.statistics.service.statistics_service import statistics_service
from snm.app.statistics.utils.closed_form import gamma_gini_variance, gamma_scv_expectation
from snm.common.enums import DistributionFamily, EstimatorMethod, ExperimentCommand
from snm.common.exception import errors
from snm.common.log import log
from snm.core.conf import settings

GAMMA_SHAPES = (0.5, 1.0, 2.0, 5.0)
GAMMA_SIZES = (2, 5, 20, 100)
CONTINUOUS_LAWS = (
    'gamma(shape=2,scale=1)',
    'exponential(rate=1)',
    'pareto(shape=2.5,scale=1)',
    'lognormal(sigma=0.8)',
    'inverse_gaussian(mean=1,shape=2)',
)


@dataclasses.dataclass(frozen=True)
class ValidateOptions:
    config: QuadratureConfig
    seed: int
    scale: float
    workers: int

    def reps(self, base: int) -> int:
        return max(1000, int(base * self.scale))


@dataclasses.dataclass(frozen=True)
class Suite:
    name: str
    run: Callable[[ValidateOptions], list[ValidationCheck]]
    quick: bool = False


SUITES: dict[str, Suite] = {}


def suite(name: str, *, quick: bool = False) -> Callable:
    """Register a validation suite under ``name``"""

    def decorator(func: Callable[[ValidateOptions], list[ValidationCheck]]) -> Callable:
        SUITES[name] = Suite(name, func, quick)
        return func

    return decorator


def _check(suite_name: str, name: str, engine: float, oracle: float, band: float, detail: str = '') -> ValidationCheck:
    return ValidationCheck(suite_name, name, engine, oracle, band, bool(abs(engine - oracle) <= band), detail)


def _flag(suite_name: str, name: str, passed: bool, detail: str) -> ValidationCheck:
    return ValidationCheck(suite_name, name, math.nan, math.nan, 0.0, bool(passed), detail)


@suite('gamma-identity')
def gamma_identity(options: ValidateOptions) -> list[ValidationCheck]:
    checks = []
    for alpha, x in itertools.product((0.3, 1.0, 2.0, 7.5), (0.5, 1.0, 3.0)):
        result = quadrature_service.integrate_with_power_weight(lambda lam: np.exp(-lam * x), alpha, options.config)
        exact = x**-alpha
        checks.append(_check('gamma-identity', f'α={alpha:g} x={x:g}', result.value, exact, 1e-9 * exact))
    return checks


@suite('gamma-unbiasedness')
def gamma_unbiasedness(options: ValidateOptions) -> list[ValidationCheck]:
    checks = []
    for shape, n in itertools.product(GAMMA_SHAPES, GAMMA_SIZES):
        dist = DistributionSpec.create('gamma', shape=shape, scale=1.0)
        result = statistics_service.gini_expectation(dist, n, config=options.config)
        checks.append(_check('gamma-unbiasedness', f'α={shape:g} n={n}', result.ratio_R, 1.0, 1e-8, 'R'))
    return checks


@suite('gamma-scv')
def gamma_scv(options: ValidateOptions) -> list[ValidationCheck]:
    checks = []
    for shape, n in itertools.product(GAMMA_SHAPES, GAMMA_SIZES):
        dist = DistributionSpec.create('gamma', shape=shape, scale=1.0)
        result = statistics_service.scv_expectation(dist, n, config=options.config)
        exact = gamma_scv_expectation(shape, n)
        checks.append(_check('gamma-scv', f'α={shape:g} n={n}', result.expected, exact, 1e-8 * exact))
    return checks


@suite('discrete-enumeration', quick=True)
def discrete_enumeration(options: ValidateOptions) -> list[ValidationCheck]:
    checks = []
    laws = ('bernoulli(p=0.3)', 'bernoulli(p=0.5)', 'bernoulli(p=0.9)', 'poisson(mu=0.5)', 'poisson(mu=2)')
    for text, n, r in itertools.product(laws, (2, 3, 5, 8), (0.0, 1.0)):
        dist = DistributionSpec.parse(text)
        bound = 1e-8 if n >= 8 else 1e-10
        for label, stat in (('gini', gini_statistic(r)), ('scv', scv_statistic(r))):
            exact = oracle_service.enumerate_expected_statistic(dist, n, stat, truncation_mass_bound=bound)
            result = engine_service.expected_ratio_iid(dist, n, stat, options.config)
            band = 1e-7 + exact.truncation_bound
            name = f'{label} {text} n={n} r={r:g}'
            checks.append(_check('discrete-enumeration', name, result.value, exact.value, band))
    return checks


@suite('pareto-bias')
def pareto_bias(options: ValidateOptions) -> list[ValidationCheck]:
    checks = []
    ratios = {}
    reps = options.reps(1_000_000)
    for k, (shape, n) in enumerate(itertools.product((1.5, 2.0, 3.0), (3, 5, 10, 20))):
        dist = DistributionSpec.create('pareto', shape=shape, scale=1.0)
        result = statistics_service.gini_expectation(dist, n, config=options.config)
        estimate = oracle_service.mc_expected_statistic(
            dist, n, gini_statistic(), reps, options.seed + k, workers=options.workers
        )
        band = 3.0 * math.hypot(estimate.std_error, result.moment.quadrature_error)
        checks.append(_check('pareto-bias', f'E Ĝ α={shape:g} n={n}', result.expected, estimate.mean, band, 'MC 3σ'))
        ratios[(shape, n)] = result.ratio_R
        checks.append(_flag('pareto-bias', f'R<1 α={shape:g} n={n}', result.ratio_R < 1, f'R={result.ratio_R:.6f}'))
    for n in (3, 5, 10, 20):
        increasing = ratios[(1.5, n)] < ratios[(2.0, n)] < ratios[(3.0, n)]
        checks.append(_flag('pareto-bias', f'R increasing in α, n={n}', increasing, ''))
    for shape in (1.5, 2.0, 3.0):
        increasing = all(ratios[(shape, a)] < ratios[(shape, b)] for a, b in itertools.pairwise((3, 5, 10, 20)))
        checks.append(_flag('pareto-bias', f'R increasing in n, α={shape:g}', increasing, ''))
    return checks


@suite('gamma-variance')
def gamma_variance(options: ValidateOptions) -> list[ValidationCheck]:
    checks = []
    reps = options.reps(1_000_000)
    for k, (shape, n) in enumerate(itertools.product((1.0, 2.0), (2, 5, 10))):
        dist = DistributionSpec.create('gamma', shape=shape, scale=1.0)
        xi1 = statistics_service.xi1_reference(dist, samples=options.reps(settings.XI1_REFERENCE_SAMPLES))
        closed = gamma_gini_variance(shape, n, xi1.mean)
        # dVar/dξ1 = (n - 2) / (α(n - 1)(αn + 1))
        closed_sigma = (n - 2) * xi1.std_error / (shape * (n - 1) * (shape * n + 1))
        engine = statistics_service.gini_second_moment(dist, n, config=options.config)
        engine_sigma = engine.moment.total_error
        mc = oracle_service.mc_expected_statistic(
            dist, n, gini_statistic(), reps, options.seed + 100 + k, workers=options.workers
        )
        mc_sigma = mc.variance_std_error
        name = f'α={shape:g} n={n}'
        pairs = (
            ('closed/engine', closed, closed_sigma, engine.variance, engine_sigma),
            ('engine/MC', engine.variance, engine_sigma, mc.sample_variance, mc_sigma),
            ('closed/MC', closed, closed_sigma, mc.sample_variance, mc_sigma),
        )
        for label, first, first_sigma, second, second_sigma in pairs:
            band = 3 * math.hypot(first_sigma, second_sigma) + 1e-9
            checks.append(_check('gamma-variance', f'{label} {name}', first, second, band))
        if shape == 1.0 and n == 2:
            checks.append(_check('gamma-variance', 'engine 1/12', engine.variance, 1 / 12, 3 * engine_sigma + 1e-9))
            checks.append(_check('gamma-variance', 'MC 1/12', mc.sample_variance, 1 / 12, 3 * mc_sigma))
    return checks


@suite('debiasing')
def debiasing(options: ValidateOptions) -> list[ValidationCheck]:
    config = ExperimentConfig(
        command=ExperimentCommand.debias_experiment,
        dist='pareto(shape=2)',
        n_list=(20, 50),
        replications=options.reps(100_000),
        seed=options.seed,
        quadrature=options.config,
        workers=options.workers,
    )
    rows = [
        row
        for k, alpha in enumerate((1.2, 1.5, 2.0, 2.5, 3.0))
        for row in experiment_service.debias_table(
            config.model_copy(update={'param_grid': repr(alpha), 'seed': options.seed + k})
        )
    ]
    mean_abs = {
        (n, method): float(np.mean([row['abs_bias'] for row in rows if row['n'] == n and row['method'] == method]))
        for n in (20, 50)
        for method in EstimatorMethod
    }
    checks = []
    at20 = {method: mean_abs[(20, method)] for method in EstimatorMethod}
    detail = ', '.join(f'{m.value}={v:.5f}' for m, v in at20.items())
    checks.append(
        _flag(
            'debiasing',
            'plain has the largest |bias| at n=20',
            all(at20[EstimatorMethod.plain] > v for m, v in at20.items() if m != EstimatorMethod.plain),
            detail,
        )
    )
    rest = (EstimatorMethod.mle_plugin, EstimatorMethod.mle_debiased, EstimatorMethod.mom_debiased)
    checks.append(
        _flag(
            'debiasing',
            'MoM plug-in second at n=20',
            all(at20[EstimatorMethod.mom_plugin] > at20[m] for m in rest),
            detail,
        )
    )
    for method in EstimatorMethod:
        shrinks = mean_abs[(50, method)] < mean_abs[(20, method)]
        checks.append(
            _flag(
                'debiasing',
                f'{method.value} |bias| shrinks from n=20 to n=50',
                shrinks,
                f'{mean_abs[(20, method)]:.5f} -> {mean_abs[(50, method)]:.5f}',
            )
        )
    return checks


@suite('engine-sanity')
def engine_sanity(options: ValidateOptions) -> list[ValidationCheck]:
    checks = []
    for text in CONTINUOUS_LAWS:
        dist = DistributionSpec.parse(text)
        tolerance = 1e-8 if dist.family == DistributionFamily.lognormal else 1e-9
        report = engine_service.sanity_identity_suite(dist, 5, tolerance=tolerance, config=options.config)
        for case in report.cases:
            band = case.tolerance + case.quadrature_error
            checks.append(_check('engine-sanity', f'{case.label} {text}', case.value, case.expected, band))
    return checks


@suite('evaluation-count')
def evaluation_count(options: ValidateOptions) -> list[ValidationCheck]:
    checks = []
    for shape in GAMMA_SHAPES:
        dist = DistributionSpec.create('gamma', shape=shape, scale=1.0)
        small = statistics_service.gini_expectation(dist, 2, config=options.config).moment.evaluations
        large = statistics_service.gini_expectation(dist, 100, config=options.config).moment.evaluations
        ratio = max(small, large) / max(min(small, large), 1)
        checks.append(_flag('evaluation-count', f'α={shape:g}', ratio < 2.0, f'n=2: {small}, n=100: {large}'))
    return checks


class ValidateService:
    """Engine against closed forms, enumeration and Monte Carlo"""

    @staticmethod
    def selected_suites(config: ExperimentConfig) -> list[Suite]:
        if config.suite is not None:
            if config.suite not in SUITES:
                raise errors.ConfigError(msg=f'Unknown suite {config.suite!r}', data={'known': list(SUITES)})
            return [SUITES[config.suite]]
        if config.quick:
            return [s for s in SUITES.values() if s.quick]
        return list(SUITES.values())

    @staticmethod
    def run_validate(config: ExperimentConfig) -> ValidationReport:
        """
        Run the selected suites, a suite that raises is reported as one failed check

        :param config: Experiment config, ``suite``, ``quick`` and ``scale`` select the work
        :return:
        """
        options = ValidateOptions(config.quadrature, config.seed, config.scale, config.workers)
        checks: list[ValidationCheck] = []
        for selected in ValidateService.selected_suites(config):
            log.info('Running suite {}', selected.name)
            try:
                results = selected.run(options)
            except errors.BaseExceptionError as e:
                log.error('Suite {} raised: {}', selected.name, e.msg)
                results = [_flag(selected.name, 'suite completed', False, f'{type(e).__name__}: {e.msg}')]
            failed = sum(not check.passed for check in results)
            log.info('Suite {}: {} checks, {} failed', selected.name, len(results), failed)
            checks.extend(results)
        return ValidationReport(tuple(checks))


validate_service: ValidateService = ValidateService()
