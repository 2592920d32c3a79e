import pytest

from snm.app.quadrature.schema.quadrature import QuadratureConfig


@pytest.fixture(scope='module')
def config() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture(scope='module')
def log_config() -> QuadratureConfig:
    return QuadratureConfig(transform='log_map')
