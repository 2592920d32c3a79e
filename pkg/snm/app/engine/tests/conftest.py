import pytest

from snm.app.engine.model.kernel import CoordinateKernel, SumPowerKernel
from snm.app.engine.schema.ratio import RatioStatistic
from snm.app.quadrature.schema.quadrature import QuadratureConfig


@pytest.fixture(scope='module')
def config() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture(scope='module')
def identity() -> RatioStatistic:
    return RatioStatistic(SumPowerKernel(1), 1.0)


@pytest.fixture(scope='module')
def first_share() -> RatioStatistic:
    return RatioStatistic(CoordinateKernel(0), 1.0)
