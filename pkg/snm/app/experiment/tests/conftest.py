import numpy as np
import pytest

from snm.app.estimators.utils.bias_grid import BiasGrid
from snm.app.experiment.schema.experiment import ExperimentConfig
from snm.common.enums import ExperimentCommand


@pytest.fixture
def make_config(tmp_path):
    def _make(command: ExperimentCommand | str, **values) -> ExperimentConfig:
        return ExperimentConfig(command=command, out=tmp_path, **values)

    return _make


@pytest.fixture
def synthetic_bias(monkeypatch):
    """Replace the tabulated Pareto bias with a cheap monotone curve"""
    from snm.app.experiment.service import experiment_service as module

    grid = BiasGrid.from_function(lambda a: -0.05 / a, np.geomspace(1.01, 50.0, 12))
    monkeypatch.setattr(module, 'get_bias_grid', lambda *args, **kwargs: grid)
    return grid
