import pytest

from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.quadrature.schema.quadrature import QuadratureConfig

# One representative per family
CATALOG = [
    'gamma(shape=2,scale=1)',
    'exponential(rate=1.5)',
    'pareto(shape=2.5,scale=1)',
    'poisson(mu=2)',
    'bernoulli(p=0.3)',
    'negative_binomial(k=3,p=0.4)',
    'lognormal(sigma=0.8)',
    'inverse_gaussian(mean=1,shape=2)',
    'pointmass(1.5)',
]


@pytest.fixture(scope='module')
def config() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture(params=CATALOG)
def dist(request) -> DistributionSpec:
    return DistributionSpec.parse(request.param)
