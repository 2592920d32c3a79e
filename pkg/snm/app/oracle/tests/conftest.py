import pytest

from snm.app.engine.schema.ratio import RatioStatistic
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.app.statistics.model.named_statistic import gini_statistic, scv_statistic


@pytest.fixture(scope='module')
def config() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture(scope='module')
def gini() -> RatioStatistic:
    return gini_statistic()


@pytest.fixture(scope='module')
def scv() -> RatioStatistic:
    return scv_statistic()
