import math

import numpy as np
import pytest

from scipy import integrate, special

from snm.app.distributions.model import get_family_model
from snm.app.distributions.schema.distribution import DistributionSpec, TiltedView, resolve_family
from snm.app.distributions.service.distribution_service import distribution_service
from snm.app.distributions.utils.law import law_cross_gmd, law_gmd
from snm.app.quadrature.service.quadrature_service import quadrature_service
from snm.common.enums import DistributionFamily
from snm.common.exception import errors


def _fd_tilted_mean(dist: DistributionSpec, lam: float) -> float:
    h = 1e-5 * max(1.0, lam)
    log_l = distribution_service.log_laplace(dist, np.array([lam - h, lam + h]))
    return -(log_l[1] - log_l[0]) / (2 * h)


def test_parse_spec_forms():
    assert DistributionSpec.parse('gamma(shape=2,scale=1)').as_dict() == {'shape': 2.0, 'scale': 1.0}
    assert DistributionSpec.parse('pareto(shape=2)').as_dict() == {'shape': 2.0, 'scale': 1.0}
    assert DistributionSpec.parse('pointmass(1)').as_dict() == {'value': 1.0}
    assert DistributionSpec.parse('exponential(rate=2)').as_dict() == {'rate': 2.0}
    assert DistributionSpec.parse('gamma(shape=2,rate=4)').param('scale') == 0.25
    assert DistributionSpec.parse('pareto(shape=2)', {'shape': 3}).param('shape') == 3.0


def test_parse_text_round_trip(dist):
    assert DistributionSpec.parse(dist.text()) == dist


@pytest.mark.parametrize(
    ('text', 'error'),
    [
        ('cauchy(scale=1)', errors.ConfigError),
        ('gamma(scale=1)', errors.ConfigError),
        ('gamma(shape=2,width=1)', errors.ConfigError),
        ('pareto(shape=1)', errors.DomainError),
        ('bernoulli(p=1.5)', errors.DomainError),
        ('gamma(shape=abc)', errors.ConfigError),
    ],
)
def test_parse_rejects(text, error):
    with pytest.raises(error):
        DistributionSpec.parse(text)


def test_laplace_examples():
    gamma = DistributionSpec.parse('gamma(shape=2,scale=1)')
    assert distribution_service.laplace(gamma, 1.0) == pytest.approx(0.25, rel=1e-14)

    pareto = DistributionSpec.parse('pareto(shape=2,scale=1)')
    reference, _ = integrate.quad(lambda x: math.exp(-x) * 2 * x**-3, 1, np.inf, epsabs=0, epsrel=1e-13)
    assert distribution_service.laplace(pareto, 1.0) == pytest.approx(reference, rel=1e-10)

    bernoulli = DistributionSpec.parse('bernoulli(p=0.3)')
    assert distribution_service.laplace(bernoulli, 2.0) == pytest.approx(0.7 + 0.3 * math.exp(-2), rel=1e-14)

    poisson = DistributionSpec.parse('poisson(mu=2)')
    assert distribution_service.laplace(poisson, 1.0) == pytest.approx(math.exp(2 * (math.exp(-1) - 1)), rel=1e-14)


def test_laplace_at_zero(dist):
    assert distribution_service.laplace(dist, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_laplace_rejects_negative_lambda():
    with pytest.raises(errors.DomainError):
        distribution_service.laplace(DistributionSpec.parse('gamma(shape=2)'), -0.1)
    with pytest.raises(errors.DomainError):
        TiltedView(DistributionSpec.parse('gamma(shape=2)'), -1.0)


def test_laplace_monotone_convex_with_zero_mass_limit(dist):
    lam = np.linspace(0.0, 20.0, 201)
    values = distribution_service.laplace(dist, lam)
    assert values[0] == pytest.approx(1.0, abs=1e-14)
    assert np.all(np.diff(values) <= 1e-14)
    assert np.all(np.diff(values, 2) >= -1e-12)
    excess = distribution_service.laplace(dist, 1e6) - distribution_service.zero_mass(dist)
    assert -1e-14 <= excess <= 1e-5


@pytest.mark.parametrize('lam', [1e3, 1e6, 1e9])
def test_exponential_laplace_far_tail(lam):
    dist = DistributionSpec.parse('exponential(rate=1.5)')
    assert distribution_service.laplace(dist, lam) == pytest.approx(1.0 / (1.0 + lam / 1.5), rel=1e-12)


def test_spec_accepts_family_enum():
    spec = DistributionSpec.create(DistributionFamily.gamma, shape=2.0)
    assert spec.family is DistributionFamily.gamma
    assert str(spec.family) == 'gamma'
    assert f'{spec.family}' == 'gamma'
    assert DistributionSpec(spec.family, spec.params) == spec
    assert DistributionSpec.parse(spec.text()) == spec
    assert resolve_family(DistributionFamily.pareto) is DistributionFamily.pareto


@pytest.mark.parametrize(
    ('text', 'expected'),
    [
        ('bernoulli(p=0.3)', 0.7),
        ('gamma(shape=2,scale=1)', 0.0),
        ('poisson(mu=1)', math.exp(-1)),
        ('negative_binomial(k=2,p=0.5)', 0.25),
        ('pointmass(0)', 1.0),
        ('pointmass(2)', 0.0),
    ],
)
def test_zero_mass(text, expected):
    assert distribution_service.zero_mass(DistributionSpec.parse(text)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize('lam', [0.1, 1.0, 5.0])
def test_tilted_mean_matches_laplace_derivative(dist, lam):
    moments = distribution_service.tilted_moments(TiltedView(dist, lam), ['mean'])
    assert moments.mean == pytest.approx(_fd_tilted_mean(dist, lam), rel=1e-6)


def test_tilted_closed_forms():
    gamma = DistributionSpec.parse('gamma(shape=2,scale=1)')
    moments = distribution_service.tilted_moments(TiltedView(gamma, 1.0), ['mean', 'variance', 'gmd'])
    assert moments.mean == pytest.approx(1.0)
    assert moments.variance == pytest.approx(0.5)
    assert moments.xi2 == 2 * moments.variance
    assert moments.xi0 == moments.gmd**2
    assert moments.requested == {'mean', 'variance', 'gmd'}

    poisson = DistributionSpec.parse('poisson(mu=2)')
    tilted = distribution_service.tilted_moments(TiltedView(poisson, 0.7), ['mean', 'variance'])
    assert tilted.mean == pytest.approx(2 * math.exp(-0.7))
    assert tilted.variance == pytest.approx(2 * math.exp(-0.7))


def test_tilted_law_is_normalized(dist):
    law = get_family_model(dist).tilted_law(0.8)
    assert law.expect(lambda x: 1.0 + 0.0 * x) == pytest.approx(1.0, rel=1e-8)


def test_gamma_generic_gmd_matches_scaling(config):
    model = get_family_model(DistributionSpec.parse('gamma(shape=2.5,scale=2)'), config)
    for lam in (0.0, 0.3, 4.0):
        result = law_gmd(model.tilted_law(lam), config)
        assert result.value == pytest.approx(model.tilted_gmd(lam), rel=1e-8)
        assert result.error_estimate >= 0
        assert result.converged


def test_lognormal_grid_gmd_matches_closed_form():
    model = get_family_model(DistributionSpec.parse('lognormal(sigma=0.8,mu=0.3)'))
    assert model.tilted_gmd(0.0) == pytest.approx(model.gmd(), rel=1e-6)
    assert model.tilted_mean(0.0) == pytest.approx(model.mean(), rel=1e-8)


def test_pareto_tilted_moments_match_quadrature():
    dist = DistributionSpec.parse('pareto(shape=2,scale=1)')
    lam = 0.5

    def weighted(func):
        value, _ = integrate.quad(lambda x: func(x) * math.exp(-lam * x) * 2 * x**-3, 1, np.inf, epsrel=1e-12)
        return value

    norm = weighted(lambda x: 1.0)
    mean = weighted(lambda x: x) / norm
    second = weighted(lambda x: x * x) / norm
    moments = distribution_service.tilted_moments(TiltedView(dist, lam), ['mean', 'variance'])
    assert moments.mean == pytest.approx(mean, rel=1e-9)
    assert moments.variance == pytest.approx(second - mean**2, rel=1e-8)


def test_pareto_tilted_gmd_matches_double_integral():
    dist = DistributionSpec.parse('pareto(shape=2,scale=1)')
    lam = 0.5
    norm, _ = integrate.quad(lambda x: math.exp(-lam * x) * 2 * x**-3, 1, np.inf, epsrel=1e-12)

    def density(x):
        return math.exp(-lam * x) * 2 * x**-3 / norm

    upper, _ = integrate.dblquad(
        lambda y, x: (y - x) * density(x) * density(y), 1, np.inf, lambda x: x, lambda x: np.inf, epsrel=1e-10
    )
    gmd = distribution_service.tilted_moments(TiltedView(dist, lam), ['gmd']).gmd
    assert gmd == pytest.approx(2 * upper, rel=1e-6)


def test_pareto_squared_tail_gmd_matches_direct_form(config):
    law = get_family_model(DistributionSpec.parse('pareto(shape=2,scale=1)'), config).tilted_law(0.5)
    assert law.heavy_tail
    direct = quadrature_service.integrate_semi_infinite(
        lambda y: 2.0 * law.cdf(1.0 + y) * law.sf(1.0 + y), config, scale=1.0
    )
    assert law_gmd(law, config).value == pytest.approx(direct.value, rel=1e-8)


@pytest.mark.parametrize('lam', [1e-4, 1e-2])
def test_pareto_gmd_converges_near_unit_shape(config, lam):
    law = get_family_model(DistributionSpec.parse('pareto(shape=1.01,scale=1)'), config).tilted_law(lam)
    result = law_gmd(law, config)
    assert result.converged
    # GMD = 2 ∫ F S lies strictly below 2 ∫ S = 2 (E X - x_m)
    assert 0 < result.value < 2.0 * (law.mean() - 1.0)


def test_pareto_pdf_and_ppf_are_consistent():
    law = get_family_model(DistributionSpec.parse('pareto(shape=2,scale=1)')).tilted_law(0.5)
    q = np.array([0.05, 0.5, 0.95])
    assert law.cdf(law.ppf(q)) == pytest.approx(q, abs=1e-10)
    total, _ = integrate.quad(lambda x: float(law.pdf(x)), 1, np.inf, epsrel=1e-12)
    assert total == pytest.approx(1.0, rel=1e-9)


def test_infinite_moments_raise_capability_error():
    pareto = DistributionSpec.parse('pareto(shape=2,scale=1)')
    with pytest.raises(errors.CapabilityError):
        distribution_service.tilted_moments(TiltedView(pareto, 0.0), ['variance'])
    with pytest.raises(errors.CapabilityError):
        distribution_service.tilted_moments(TiltedView(pareto, 0.0), ['xi1'])
    with pytest.raises(errors.CapabilityError):
        distribution_service.population_stat(pareto, 'scv')
    # a positive tilt makes every moment finite
    tilted = distribution_service.tilted_moments(TiltedView(pareto, 0.5), ['variance'])
    assert np.isfinite(tilted.variance)


def test_exponential_xi1():
    exponential = DistributionSpec.parse('exponential(rate=1)')
    base = distribution_service.tilted_moments(TiltedView(exponential, 0.0), ['xi1'])
    assert base.xi1 == pytest.approx(4 / 3, abs=max(5 * base.xi1_std_error, 2e-3))
    tilted = distribution_service.tilted_moments(TiltedView(exponential, 1.0), ['xi1'])
    assert tilted.xi1 == pytest.approx(base.xi1 / 4, rel=1e-12)


@pytest.mark.parametrize(
    ('text', 'lam'),
    [
        ('gamma(shape=2,scale=1)', 0.0),
        ('pareto(shape=2.5,scale=1)', 0.5),
        ('poisson(mu=2)', 0.3),
        ('bernoulli(p=0.5)', 1.0),
        ('lognormal(sigma=0.8)', 1.0),
        ('inverse_gaussian(mean=1,shape=2)', 0.5),
    ],
)
def test_xi_ordering(text, lam):
    moments = distribution_service.tilted_moments(
        TiltedView(DistributionSpec.parse(text), lam), ['variance', 'gmd', 'xi1']
    )
    slack = 5 * moments.xi1_std_error + 1e-3 * moments.xi2
    assert moments.xi1 >= 0
    assert moments.xi0 <= moments.xi1 + slack
    assert moments.xi1 <= moments.xi2 + slack


def test_discrete_xi1_exact():
    moments = distribution_service.tilted_moments(TiltedView(DistributionSpec.parse('bernoulli(p=0.5)'), 0.0), ['xi1'])
    # m(0) = m(1) = 1/2
    assert moments.xi1 == pytest.approx(0.25, rel=1e-14)
    assert moments.xi1_std_error == 0


@pytest.mark.parametrize(
    ('text', 'lam', 'expected'),
    [
        ('gamma(shape=3,scale=1)', 3.0, 0.25),
        ('gamma(shape=0.5,scale=2)', 1.0, 1 / 3),
        ('bernoulli(p=0.5)', math.log(3), 0.75),
        ('pareto(shape=3,scale=1)', 0.0, 1.0),
        ('poisson(mu=2)', 0.0, 1.0),
    ],
)
def test_gmd_scaling_g(text, lam, expected):
    assert distribution_service.gmd_scaling_g(DistributionSpec.parse(text), lam) == pytest.approx(expected, rel=1e-12)


def test_gmd_scaling_g_rejects_degenerate_base():
    with pytest.raises(errors.DomainError):
        distribution_service.gmd_scaling_g(DistributionSpec.parse('pointmass(2)'), 1.0)


@pytest.mark.parametrize(
    ('text', 'stat', 'expected'),
    [
        ('gamma(shape=1,scale=1)', 'gini', special.gamma(1.5) / (math.sqrt(math.pi) * special.gamma(2))),
        ('gamma(shape=2,scale=3)', 'gini', special.gamma(2.5) / (math.sqrt(math.pi) * special.gamma(3))),
        ('pareto(shape=2,scale=1)', 'gini', 1 / 3),
        ('pointmass(2)', 'gini', 0.0),
        ('pointmass(0)', 'gini', 0.0),
        ('bernoulli(p=0.3)', 'gini', 0.7),
        ('lognormal(sigma=1)', 'gini', special.erf(0.5)),
        ('gamma(shape=4,scale=1)', 'scv', 0.25),
        ('pareto(shape=3,scale=1)', 'scv', 1 / 3),
        ('poisson(mu=2)', 'scv', 0.5),
        ('gamma(shape=2,scale=1)', 'theil', special.digamma(3) - math.log(2)),
        ('pareto(shape=3,scale=1)', 'theil', 0.5 - math.log(1.5)),
        ('lognormal(sigma=0.6)', 'theil', 0.18),
        ('bernoulli(p=0.25)', 'theil', math.log(4)),
        ('pointmass(3)', 'theil', 0.0),
    ],
)
def test_population_stat(text, stat, expected):
    assert distribution_service.population_stat(DistributionSpec.parse(text), stat) == pytest.approx(
        expected, rel=1e-9, abs=1e-14
    )


def test_population_theil_matches_generic_path():
    model = get_family_model(DistributionSpec.parse('inverse_gaussian(mean=1,shape=2)'))
    mean = model.mean()
    value, _ = integrate.quad(lambda x: x * math.log(x) * float(model.base_law.pdf(x)), 0, np.inf, epsrel=1e-11)
    assert model.theil() == pytest.approx(value / mean - math.log(mean), rel=1e-6)


def test_cross_gmd_of_identical_laws_is_gmd(config):
    model = get_family_model(DistributionSpec.parse('gamma(shape=2,scale=1)'), config)
    assert law_cross_gmd(model.base_law, model.base_law, config).value == pytest.approx(model.gmd(), rel=1e-8)


def test_cross_gmd_mixed_laws(config):
    point = get_family_model(DistributionSpec.parse('pointmass(1)'), config).base_law
    exponential = get_family_model(DistributionSpec.parse('exponential(rate=1)'), config).base_law
    # E|1 - X| = 2/e for X ~ Exp(1)
    result = law_cross_gmd(point, exponential, config)
    assert result.value == pytest.approx(2 / math.e, rel=1e-8)
    assert result.converged


@pytest.mark.parametrize(
    ('text', 'n', 'expected'),
    [
        ('pointmass(2)', 3, [2.0, 2.0, 2.0]),
        ('bernoulli(p=1)', 4, [1.0, 1.0, 1.0, 1.0]),
    ],
)
def test_sample_degenerate(text, n, expected):
    data = distribution_service.sample(DistributionSpec.parse(text), n, seed=123)
    assert data.values.tolist() == expected


def test_sample_is_deterministic_per_seed(dist):
    first = distribution_service.sample(dist, 50, seed=9)
    second = distribution_service.sample(dist, 50, seed=9)
    assert np.array_equal(first.values, second.values)
    assert np.all(first.values >= 0)


def test_gamma_sample_mean():
    data = distribution_service.sample(DistributionSpec.parse('gamma(shape=2,scale=1)'), 10**6, seed=2024)
    assert abs(data.values.mean() - 2.0) < 4 * math.sqrt(2) / 1e3


def test_sample_rejects_empty():
    with pytest.raises(errors.ConfigError):
        distribution_service.sample(DistributionSpec.parse('gamma(shape=2)'), 0, seed=1)
