import math

import pytest

from snm.app.distributions.model import get_family_model
from snm.app.oracle.service.oracle_service import oracle_service
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.app.statistics.model.named_statistic import gini_statistic, theil_statistic
from snm.app.statistics.service.statistics_service import statistics_service
from snm.app.statistics.utils.closed_form import (
    gamma_gini,
    gamma_gini_second_moment,
    gamma_gini_variance,
    gamma_scv_expectation,
    gamma_scv_ratio,
    gamma_theil_expectation,
)
from snm.common.exception import errors


@pytest.mark.parametrize('shape', [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize('n', [2, 5, 20, 100])
def test_gamma_gini_is_unbiased(config, spec, shape, n):
    result = statistics_service.gini_expectation(spec(f'gamma(shape={shape},scale=3)'), n, config=config)
    assert result.population_G == pytest.approx(gamma_gini(shape), rel=1e-12)
    assert abs(result.ratio_R - 1.0) <= 1e-8


@pytest.mark.parametrize(
    ('text', 'expected'),
    [('exponential(rate=1)', 0.5), ('bernoulli(p=0.5)', 0.5)],
)
def test_gini_pair_examples(config, spec, text, expected):
    result = statistics_service.gini_expectation(spec(text), 2, config=config)
    assert result.expected == pytest.approx(expected, abs=1e-10)


def test_gini_of_point_mass(config, spec):
    result = statistics_service.gini_expectation(spec('pointmass(3)'), 4, config=config)
    assert result.expected == 0.0
    assert result.ratio_R is None


def test_gini_needs_two_observations(spec):
    with pytest.raises(errors.ConfigError):
        statistics_service.gini_expectation(spec('gamma(shape=1)'), 1)
    with pytest.raises(errors.ConfigError):
        statistics_service.scv_expectation(spec('gamma(shape=1)'), 1)


def test_pareto_downward_bias(config, spec):
    ratios = {
        (shape, n): statistics_service.gini_expectation(spec(f'pareto(shape={shape},scale=1)'), n, config=config).ratio_R
        for shape in (1.5, 3.0)
        for n in (3, 10)
    }
    assert all(ratio < 1 for ratio in ratios.values())
    for n in (3, 10):
        assert ratios[(1.5, n)] < ratios[(3.0, n)]
    for shape in (1.5, 3.0):
        assert ratios[(shape, 3)] < ratios[(shape, 10)]


def test_second_moment_at_two_observations(config, spec):
    result = statistics_service.gini_second_moment(spec('exponential(rate=1)'), 2, config=config)
    assert result.second_moment == pytest.approx(1 / 3, rel=1e-9)
    assert result.variance == pytest.approx(1 / 12, rel=1e-8)
    assert gamma_gini_variance(1.0, 2, xi1=0.0) == pytest.approx(1 / 12, rel=1e-14)


def test_second_moment_matches_gamma_closed_form(config, spec):
    dist = spec('gamma(shape=2,scale=1)')
    xi1 = get_family_model(dist, config).tilted_xi1(0.0).value
    result = statistics_service.gini_second_moment(dist, 10, config=config)
    assert result.second_moment == pytest.approx(gamma_gini_second_moment(2.0, 10, xi1), rel=1e-8)
    assert result.variance == pytest.approx(gamma_gini_variance(2.0, 10, xi1), abs=1e-9)
    assert result.moment.inner_std_error is not None


def test_second_moment_needs_finite_variance(spec):
    with pytest.raises(errors.CapabilityError) as exc_info:
        statistics_service.gini_second_moment(spec('pareto(shape=1.5,scale=1)'), 5)
    assert exc_info.value.data['moment'] == 'xi2'


@pytest.mark.parametrize('text', ['poisson(mu=2)', 'bernoulli(p=0.3)', 'gamma(shape=0.5,scale=1)'])
def test_variance_is_non_negative(config, spec, text):
    result = statistics_service.gini_second_moment(spec(text), 4, r=0.5, config=config)
    assert result.variance >= 0


def test_exponential_variance_against_monte_carlo(config, spec):
    dist = spec('exponential(rate=1)')
    engine = statistics_service.gini_second_moment(dist, 5, config=config)
    estimate = oracle_service.mc_expected_statistic(dist, 5, gini_statistic(), 200_000, seed=21)
    band = 4 * math.hypot(estimate.variance_std_error, engine.moment.total_error)
    assert abs(engine.variance - estimate.sample_variance) <= band


@pytest.mark.parametrize('shape', [0.5, 2.0])
@pytest.mark.parametrize('n', [2, 5, 20])
def test_gamma_scv(config, spec, shape, n):
    result = statistics_service.scv_expectation(spec(f'gamma(shape={shape},scale=2)'), n, config=config)
    assert result.expected == pytest.approx(gamma_scv_expectation(shape, n), rel=1e-8)
    assert result.ratio_RV == pytest.approx(gamma_scv_ratio(shape, n), rel=1e-8)


def test_scv_examples(config, spec):
    assert statistics_service.scv_expectation(spec('exponential(rate=1)'), 2, config=config).expected == pytest.approx(
        2 / 3, rel=1e-9
    )
    point = statistics_service.scv_expectation(spec('pointmass(2)'), 3, config=config)
    assert point.expected == 0.0
    assert point.ratio_RV is None


@pytest.mark.parametrize('shape', [1.5, 2.0])
def test_scv_needs_finite_variance(spec, shape):
    with pytest.raises(errors.CapabilityError):
        statistics_service.scv_expectation(spec(f'pareto(shape={shape},scale=1)'), 5)


@pytest.mark.parametrize(('text', 'n'), [('pointmass(2)', 4), ('bernoulli(p=1)', 3)])
def test_theil_of_degenerate_samples(config, spec, text, n):
    result = statistics_service.theil_expectation(spec(text), n, config=config)
    assert result.expected == pytest.approx(0.0, abs=1e-15)
    assert result.population_T == pytest.approx(0.0, abs=1e-15)


def test_theil_against_monte_carlo(config, spec):
    dist = spec('exponential(rate=1)')
    result = statistics_service.theil_expectation(dist, 5, config=config)
    assert result.std_error > 0
    estimate = oracle_service.mc_expected_statistic(dist, 5, theil_statistic(), 200_000, seed=13)
    assert estimate.within(result.expected, sigmas=4, extra=result.std_error + result.moment.quadrature_error)
    assert result.expected < result.population_T


def test_gamma_closed_forms():
    assert gamma_gini(1.0) == pytest.approx(0.5, rel=1e-14)
    assert gamma_gini_variance(2.0, 2, xi1=123.0) == gamma_gini_variance(2.0, 2, xi1=0.0)
    for n, xi1 in ((3, 0.9), (10, 1.7)):
        second = gamma_gini_second_moment(2.0, n, xi1)
        assert gamma_gini_variance(2.0, n, xi1) == pytest.approx(second - gamma_gini(2.0) ** 2, rel=1e-12)
    assert gamma_scv_expectation(1.0, 2) == pytest.approx(2 / 3)
    with pytest.raises(errors.DomainError):
        gamma_gini_variance(0.0, 3, 1.0)


def test_xi1_reference_is_cached(spec):
    dist = spec('gamma(shape=1,scale=1)')
    first = statistics_service.xi1_reference(dist, samples=200_000, seed=3)
    assert first.within(4 / 3, sigmas=4)
    assert statistics_service.xi1_reference(dist, samples=200_000, seed=3) is first
    assert statistics_service.gamma_gini_variance(1.0, 2) == pytest.approx(1 / 12)


def test_reports(config, spec):
    dist = spec('gamma(shape=2,scale=1)')
    gini = statistics_service.gini_report(dist, 5, config=config, second_moment=False)
    assert gini.ratio_R == pytest.approx(1.0, abs=1e-8)
    assert gini.variance is None
    assert gini.model_dump()['distribution'] == dist.text()
    scv = statistics_service.scv_report(dist, 5, config=config)
    assert scv.expected == pytest.approx(5 / 11, rel=1e-8)
    theil = statistics_service.theil_report(spec('pointmass(1)'), 3, config=config)
    assert theil.expected == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(('shape', 'n'), [(1.0, 5), (2.0, 4)])
def test_gamma_theil_closed_form(config, spec, shape, n):
    result = statistics_service.theil_expectation(spec(f'gamma(shape={shape},scale=1.5)'), n, config=config)
    assert result.expected == pytest.approx(gamma_theil_expectation(shape, n), abs=max(5 * result.std_error, 1e-5))


@pytest.mark.parametrize('n', [2, 5, 20])
def test_transforms_agree_on_engine_integrands(spec, n):
    rational = QuadratureConfig()
    logarithmic = QuadratureConfig(transform='log_map')
    gamma = spec('gamma(shape=2,scale=1)')
    by_rational = statistics_service.gini_expectation(gamma, n, config=rational)
    by_log = statistics_service.gini_expectation(gamma, n, config=logarithmic)
    assert by_log.moment.converged
    assert by_log.ratio_R == pytest.approx(1.0, rel=1e-8)
    assert by_log.expected == pytest.approx(by_rational.expected, rel=10 * rational.rel_tol)
    scv = statistics_service.scv_expectation(gamma, n, config=logarithmic)
    assert scv.expected == pytest.approx(gamma_scv_expectation(2.0, n), rel=1e-8)
