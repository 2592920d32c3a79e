import math

import numpy as np
import pytest

from snm.app.distributions.service.distribution_service import distribution_service
from snm.app.engine.model.kernel import PairwiseKernel
from snm.app.estimators.service.estimator_service import estimator_service
from snm.app.estimators.utils.bias_grid import BiasGrid, bias_nodes
from snm.app.oracle.service.oracle_service import oracle_service
from snm.app.statistics.model.named_statistic import gini_statistic
from snm.common.dataclasses import SampleData
from snm.common.enums import EstimatorMethod, PairFunction
from snm.common.exception import errors
from snm.core.conf import settings


@pytest.mark.parametrize(
    ('values', 'r', 'expected'),
    [((1, 1, 1, 1), 0.0, 0.0), ((0, 1), 0.0, 1.0), ((0, 0, 0), 0.7, 0.7), ((0, 0, 0, 1), 0.0, 1.0)],
)
def test_sample_gini(values, r, expected):
    assert estimator_service.sample_gini(SampleData.from_values(values), r) == pytest.approx(expected, abs=1e-15)


def test_sample_gini_lorenz_form():
    data = SampleData.from_values((0, 1))
    assert estimator_service.sample_gini(data, lorenz=True) == pytest.approx(0.5, abs=1e-15)


def test_sample_statistics_need_two_values():
    with pytest.raises(errors.ConfigError):
        estimator_service.sample_gini(SampleData.from_values((1.0,)))
    with pytest.raises(errors.ConfigError):
        estimator_service.sample_scv(np.array([2.0]))
    with pytest.raises(errors.DomainError):
        estimator_service.sample_gini(np.array([1.0, -1.0]))


@pytest.mark.parametrize(
    ('values', 'r', 'expected'),
    [((2, 2, 2), 0.0, 0.0), ((0, 2), 0.0, 2.0), ((0, 0), 5.0, 5.0)],
)
def test_sample_scv(values, r, expected):
    assert estimator_service.sample_scv(SampleData.from_values(values), r) == pytest.approx(expected, abs=1e-15)


def test_sample_theil():
    assert estimator_service.sample_theil(np.array([3.0, 3.0, 3.0])) == pytest.approx(0.0, abs=1e-15)
    assert estimator_service.sample_theil(np.array([0.0, 0.0, 0.0, 5.0])) == pytest.approx(math.log(4), rel=1e-14)
    assert estimator_service.sample_theil(np.array([0.0, 0.0]), r=0.25) == 0.25


@pytest.mark.parametrize('c', [0.5, 4.0])
def test_scale_invariance(c):
    x = np.random.default_rng(3).exponential(size=200)
    assert estimator_service.sample_gini(c * x) == estimator_service.sample_gini(x)
    assert estimator_service.sample_scv(c * x) == estimator_service.sample_scv(x)
    assert estimator_service.sample_gini(3.7 * x) == pytest.approx(estimator_service.sample_gini(x), rel=1e-13)


@pytest.mark.parametrize('n', [2, 17, 1000])
def test_sorted_pair_sum_matches_double_loop(n):
    x = np.random.default_rng(n).integers(0, 10_000, size=n).astype(float)
    if x.sum() == 0:
        x[0] = 1.0
    pair_sum = np.abs(x[:, None] - x[None, :]).sum()
    assert PairwiseKernel(PairFunction.abs_diff).evaluate(x) == pair_sum
    assert estimator_service.sample_gini(x) == pytest.approx(pair_sum / (2.0 * (n - 1) * x.sum()), rel=1e-14)


def test_gini_bounds():
    rng = np.random.default_rng(5)
    for n in (2, 3, 10, 50):
        x = rng.pareto(1.1, size=(200, n))
        values = estimator_service.sample_gini_batch(x)
        assert np.all(values >= 0)
        assert np.all(values <= 1.0 + 1e-12)


def test_batches_match_single_samples():
    x = np.random.default_rng(9).gamma(2.0, size=(5, 8))
    for row, gini, scv, theil in zip(
        x,
        estimator_service.sample_gini_batch(x),
        estimator_service.sample_scv_batch(x),
        estimator_service.sample_theil_batch(x),
    ):
        assert gini == pytest.approx(estimator_service.sample_gini(row), rel=1e-14)
        assert scv == pytest.approx(estimator_service.sample_scv(row), rel=1e-14)
        assert theil == pytest.approx(estimator_service.sample_theil(row), rel=1e-12)


def test_pareto_fit_mle():
    fit = estimator_service.pareto_fit_mle(np.full(4, math.e))
    assert fit.raw == pytest.approx(1.0, rel=1e-15)
    assert fit.clamped
    assert fit.alpha == settings.PARETO_FIT_FLOOR
    fit = estimator_service.pareto_fit_mle(np.full(2, math.e**2))
    assert fit.raw == pytest.approx(0.5, rel=1e-15)
    assert fit.clamped
    fit = estimator_service.pareto_fit_mle(np.full(2, math.exp(0.5)))
    assert fit.alpha == pytest.approx(2.0, rel=1e-14)
    assert not fit.clamped


def test_pareto_fit_mle_on_large_sample(spec):
    data = distribution_service.sample(spec('pareto(shape=2,scale=1)'), 10_000, seed=1)
    fit = estimator_service.pareto_fit_mle(data)
    assert abs(fit.alpha - 2.0) <= 4 * 2.0 / math.sqrt(10_000)


def test_pareto_fit_mle_errors():
    with pytest.raises(errors.DomainError):
        estimator_service.pareto_fit_mle(np.array([0.5, 2.0]))
    with pytest.raises(errors.DegenerateSampleError):
        estimator_service.pareto_fit_mle(np.ones(3))


def test_pareto_fit_mom():
    assert estimator_service.pareto_fit_mom(np.array([1.0, 3.0])).alpha == pytest.approx(2.0, rel=1e-15)
    assert estimator_service.pareto_fit_mom(np.array([1.0, 2.0])).alpha == pytest.approx(3.0, rel=1e-15)
    with pytest.raises(errors.DomainError):
        estimator_service.pareto_fit_mom(np.full(3, 1.0 + 1e-12))


def test_batch_fits_match_single_samples():
    x = 1.0 + np.random.default_rng(4).pareto(2.0, size=(6, 10))
    mle, _ = estimator_service.pareto_fit_mle_batch(x)
    mom, _ = estimator_service.pareto_fit_mom_batch(x)
    for row, a, b in zip(x, mle, mom):
        assert a == pytest.approx(estimator_service.pareto_fit_mle(row).alpha, rel=1e-14)
        assert b == pytest.approx(estimator_service.pareto_fit_mom(row).alpha, rel=1e-14)


def test_bias_grid_interpolation(linear_bias):
    assert linear_bias(2.0) == pytest.approx(-0.05, rel=1e-2)
    assert linear_bias(0.5) == linear_bias(1.01)
    assert linear_bias(500.0) == linear_bias(50.0)
    values = linear_bias(np.array([1.5, 3.0, 10.0]))
    assert np.all(np.diff(values) > 0)


def test_bias_grid_rejects_bad_tables():
    with pytest.raises(errors.ConfigError):
        BiasGrid(np.array([1.0, 2.0]), np.array([0.0]))
    with pytest.raises(errors.EvaluationError):
        BiasGrid(np.array([1.0, 2.0]), np.array([0.0, np.nan]))
    with pytest.raises(errors.ConfigError):
        bias_nodes(count=1)
    assert bias_nodes().size == settings.BIAS_GRID_NODES


@pytest.mark.parametrize('shape', [0.5, 2.0])
def test_gamma_bias_vanishes(config, shape):
    assert abs(estimator_service.bias_function('gamma', shape, 10, config, exact=True)) <= 1e-8


def test_debiasing_is_identity_on_gamma_data(config, spec):
    data = distribution_service.sample(spec('gamma(shape=2,scale=1)'), 10, seed=4)
    bias = estimator_service.bias_function('gamma', 2.0, 10, config, exact=True)
    assert estimator_service.sample_gini(data) - bias == pytest.approx(estimator_service.sample_gini(data), abs=1e-8)


def test_pareto_bias_against_monte_carlo(config, spec):
    bias = estimator_service.bias_function('pareto', 2.0, 5, config, exact=True)
    assert bias < 0
    dist = spec('pareto(shape=2,scale=1)')
    estimate = oracle_service.mc_expected_statistic(dist, 5, gini_statistic(), 200_000, seed=6)
    assert estimate.within(bias + 1 / 3, sigmas=4)


def test_pareto_bias_shrinks_with_shape(config):
    large = estimator_service.bias_function('pareto', 50.0, 20, config, exact=True)
    small = estimator_service.bias_function('pareto', 2.0, 20, config, exact=True)
    assert abs(large) < abs(small)


def test_plugin_gini():
    assert estimator_service.plugin_gini('pareto', 2.0) == pytest.approx(1 / 3, rel=1e-15)
    assert estimator_service.plugin_gini('gamma', 1.0) == pytest.approx(0.5, rel=1e-12)


def test_debiased_gini_methods(linear_bias):
    data = SampleData.from_values((math.exp(0.5), math.exp(0.5), math.exp(0.5)))
    plain = estimator_service.debiased_gini(data, EstimatorMethod.plain)
    assert plain.value == estimator_service.sample_gini(data)
    assert plain.fitted_param is None
    plugin = estimator_service.debiased_gini(data, 'mle_plugin')
    assert plugin.fitted_param == pytest.approx(2.0, rel=1e-14)
    assert plugin.value == pytest.approx(1 / 3, rel=1e-14)
    debiased = estimator_service.debiased_gini(data, 'mle_debiased', bias=linear_bias)
    assert debiased.value == pytest.approx(0.0 - linear_bias(2.0), rel=1e-14)
    mom = estimator_service.debiased_gini(np.array([1.0, 3.0]), 'mom_plugin')
    assert mom.fitted_param == pytest.approx(2.0)
    assert mom.as_dict()['method'] == 'mom_plugin'


def test_debiased_gini_tags_fit_failures(linear_bias):
    with pytest.raises(errors.DomainError) as exc_info:
        estimator_service.debiased_gini(np.array([0.5, 2.0]), 'mle_debiased', bias=linear_bias)
    assert exc_info.value.data['method'] == 'mle_debiased'
    assert exc_info.value.msg.startswith('mle_debiased')
