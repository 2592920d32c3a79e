import numpy as np
import pytest

from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.estimators.utils.bias_grid import BiasGrid
from snm.app.quadrature.schema.quadrature import QuadratureConfig


@pytest.fixture(scope='module')
def config() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture
def spec():
    return DistributionSpec.parse


@pytest.fixture(scope='module')
def linear_bias() -> BiasGrid:
    nodes = np.geomspace(1.01, 50.0, 16)
    return BiasGrid.from_function(lambda a: -0.1 / a, nodes)
