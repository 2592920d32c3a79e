import dataclasses

from collections.abc import Callable

import numpy as np

from scipy.interpolate import PchipInterpolator

from snm.common.exception import errors
from snm.core.conf import settings


def bias_nodes(count: int | None = None, low: float | None = None, high: float | None = None) -> np.ndarray:
    """Geometric grid of shape parameters"""
    count = count or settings.BIAS_GRID_NODES
    low = low or settings.BIAS_GRID_MIN
    high = high or settings.BIAS_GRID_MAX
    if count < 2 or not 0 < low < high:
        raise errors.ConfigError(msg=f'Invalid bias grid: {count} nodes over [{low}, {high}]')
    return np.geomspace(low, high, count)


@dataclasses.dataclass(frozen=True, eq=False)
class BiasGrid:
    """
    bias(α) tabulated on nodes and interpolated monotonically in log α

    Arguments outside the node range are clamped to the end nodes.
    """

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.nodes.shape != self.values.shape or self.nodes.size < 2:
            raise errors.ConfigError(msg='Bias grid needs matching node and value arrays of length >= 2')
        if not np.all(np.isfinite(self.values)):
            raise errors.EvaluationError(msg='Bias grid contains non-finite values')
        object.__setattr__(self, '_interpolator', PchipInterpolator(np.log(self.nodes), self.values))

    @classmethod
    def from_function(cls, func: Callable[[float], float], nodes: np.ndarray | None = None) -> 'BiasGrid':
        nodes = bias_nodes() if nodes is None else np.asarray(nodes, dtype=float)
        return cls(nodes, np.array([func(float(a)) for a in nodes]))

    def __call__(self, alpha: np.ndarray | float) -> np.ndarray | float:
        log_alpha = np.log(np.clip(alpha, self.nodes[0], self.nodes[-1]))
        result = self._interpolator(log_alpha)
        return float(result) if np.ndim(alpha) == 0 else result
