import math

import numpy as np
import pytest

from snm.app.quadrature.schema.quadrature import InnerAccuracy, IntegralResult, QuadratureConfig
from snm.app.quadrature.service.quadrature_service import _on_unit_interval, quadrature_service
from snm.common.exception import errors


def test_unit_exponential(config):
    result = quadrature_service.integrate_semi_infinite(lambda lam: np.exp(-lam), config)
    assert result.converged
    assert result.value == pytest.approx(1.0, rel=1e-10)
    assert result.error_estimate <= max(config.abs_tol, config.rel_tol * abs(result.value))


def test_rational_tail_integral(config):
    # ∫ λ (1+λ)^(-αn-2) dλ = 1/(αn(αn+1)) with α=2, n=3
    result = quadrature_service.integrate_semi_infinite(lambda lam: lam * (1 + lam) ** -8.0, config)
    assert result.value == pytest.approx(1 / 42, rel=1e-9)


def test_singularity_at_zero(config):
    result = quadrature_service.integrate_semi_infinite(lambda lam: lam**-0.5 * np.exp(-lam), config)
    assert result.converged
    assert result.value == pytest.approx(math.sqrt(math.pi), rel=1e-9)


@pytest.mark.parametrize(
    ('g', 'alpha', 'expected'),
    [
        (lambda lam: np.exp(-lam), 3.0, 1.0),
        (lambda lam: np.exp(-2 * lam), 1.0, 0.5),
        (lambda lam: np.exp(-lam), 0.5, 1.0),
    ],
)
def test_power_weight_examples(config, g, alpha, expected):
    result = quadrature_service.integrate_with_power_weight(g, alpha, config)
    assert result.value == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize('alpha', [0.3, 1.0, 2.0, 7.5])
@pytest.mark.parametrize('x', [0.5, 1.0, 3.0])
def test_gamma_density_identity(config, alpha, x):
    result = quadrature_service.integrate_with_power_weight(lambda lam: np.exp(-lam * x), alpha, config)
    assert result.value == pytest.approx(x**-alpha, rel=1e-9)


def test_linearity(config):
    rng = np.random.default_rng(11)
    for _ in range(5):
        a, b = rng.uniform(-2, 2, size=2)
        c1, c2 = rng.uniform(0.5, 3, size=2)

        def f(lam):
            return np.exp(-c1 * lam)

        def g(lam):
            return 1 / (1 + c2 * lam) ** 3

        combined = quadrature_service.integrate_semi_infinite(lambda lam: a * f(lam) + b * g(lam), config).value
        separate = a * quadrature_service.integrate_semi_infinite(f, config).value
        separate += b * quadrature_service.integrate_semi_infinite(g, config).value
        assert combined == pytest.approx(separate, abs=2 * 1e-9 * (abs(a) + abs(b)))


def test_transform_invariance(config, log_config):
    def f(lam):
        return lam * (1 + 0.7 * lam) ** -5.5 + np.exp(-3 * lam)

    rational = quadrature_service.integrate_semi_infinite(f, config).value
    logarithmic = quadrature_service.integrate_semi_infinite(f, log_config).value
    assert rational == pytest.approx(logarithmic, rel=10 * config.rel_tol)


@pytest.mark.parametrize('transform', ['rational_map', 'log_map'])
def test_polynomial_tail_under_both_maps(transform):
    config = QuadratureConfig(transform=transform)
    result = quadrature_service.integrate_semi_infinite(lambda lam: (1 + lam) ** -3.0, config)
    assert result.converged
    assert result.value == pytest.approx(0.5, rel=1e-9)


@pytest.mark.parametrize('transform', ['rational_map', 'log_map'])
def test_integrand_never_sees_infinite_lambda(transform):
    seen = []

    def f(lam):
        seen.append(lam.copy())
        return np.exp(-lam)

    config = QuadratureConfig(transform=transform, rel_tol=1e-13, abs_tol=1e-300)
    result = quadrature_service.integrate_semi_infinite(f, config)
    assert result.value == pytest.approx(1.0, rel=1e-10)
    assert all(np.isfinite(lam).all() for lam in seen)


def test_unit_interval_endpoint_has_zero_weight():
    def f(lam):
        assert np.isfinite(lam).all()
        return 1.0 / (1.0 + lam) ** 2

    t = np.array([0.25, 0.5, 1.0, 1.0 - 1e-17])
    values = _on_unit_interval(f, t, lambda s: s / (1.0 - s), lambda s: 1.0 / (1.0 - s) ** 2, 1.0)
    assert values[:2] == pytest.approx([1.0, 1.0])
    assert values[2:].tolist() == [0.0, 0.0]


def test_truncation_transform():
    config = QuadratureConfig(transform='none_with_truncation', truncation_lambda_max=60.0)
    result = quadrature_service.integrate_semi_infinite(lambda lam: np.exp(-lam), config)
    assert result.value == pytest.approx(1.0, rel=1e-10)


def test_scale_hint_keeps_value(config):
    narrow = quadrature_service.integrate_semi_infinite(lambda lam: np.exp(-500 * lam), config, scale=1 / 500)
    assert narrow.value == pytest.approx(1 / 500, rel=1e-10)


def test_vector_valued_integrand(config):
    rates = np.array([1.0, 2.0, 4.0])
    result = quadrature_service.integrate_semi_infinite(lambda lam: np.exp(-np.outer(lam, rates)), config)
    assert result.components == pytest.approx(tuple(1 / rates), rel=1e-10)
    assert result.value == pytest.approx(np.mean(1 / rates), rel=1e-10)


def test_finite_interval(config):
    result = quadrature_service.integrate_interval(np.sin, 0.0, math.pi, config)
    assert result.value == pytest.approx(2.0, rel=1e-12)
    reverse = quadrature_service.integrate_interval(np.sin, math.pi, 0.0, config)
    assert reverse.value == pytest.approx(-2.0, rel=1e-12)


def test_non_convergence_is_reported():
    config = QuadratureConfig(max_subdivisions=2)
    result = quadrature_service.integrate_semi_infinite(lambda lam: np.abs(np.sin(40 * lam)) * np.exp(-lam), config)
    assert not result.converged
    assert result.subdivisions_used <= 2


def test_initial_partition(config):
    partitioned = config.partitioned(8)
    assert partitioned.initial_intervals == 8
    assert config.initial_intervals == 1
    assert QuadratureConfig(max_subdivisions=4).partitioned(8).initial_intervals == 4
    result = quadrature_service.integrate_interval(lambda x: 1.0 + 0.0 * x, 0.0, 2.0, partitioned)
    assert result.subdivisions_used == 8
    assert result.evaluations == 8 * 15
    assert result.value == pytest.approx(2.0, rel=1e-14)


def test_inner_accuracy_keeps_worst_relative_error():
    accuracy = InnerAccuracy()
    assert accuracy.record(IntegralResult(2.0, 2e-10, 3, True)) == 2.0
    accuracy.record(IntegralResult(-1.0, 5e-10, 4, True))
    accuracy.record(IntegralResult(0.0, 0.0, 1, False))
    assert accuracy.relative_error == pytest.approx(5e-10)
    assert not accuracy.converged
    merged = accuracy.merge(InnerAccuracy(relative_error=1e-8))
    assert merged.relative_error == 1e-8
    assert not merged.converged
    assert merged.integrals == 3


def test_non_finite_evaluation_carries_lambda(config):
    with pytest.raises(errors.EvaluationError) as exc:
        quadrature_service.integrate_semi_infinite(lambda lam: np.where(lam > 1, np.nan, 1.0), config)
    assert exc.value.data['lambda'] > 1


@pytest.mark.parametrize(
    'kwargs',
    [
        {'rel_tol': 0.0},
        {'abs_tol': -1.0},
        {'max_subdivisions': 0},
        {'initial_intervals': 0},
        {'max_subdivisions': 4, 'initial_intervals': 8},
        {'transform': 'none_with_truncation'},
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(errors.ConfigError):
        QuadratureConfig(**kwargs)


def test_invalid_power_exponent(config):
    with pytest.raises(errors.ConfigError):
        quadrature_service.integrate_with_power_weight(np.exp, 0.0, config)
