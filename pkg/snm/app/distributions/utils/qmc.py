import dataclasses

from collections.abc import Callable

import numpy as np

from scipy.stats import qmc

# Effective sample size share below which reweighting the base points is abandoned
_MIN_ESS_SHARE = 0.02


@dataclasses.dataclass(frozen=True, eq=False)
class QmcEstimate:
    value: float
    std_error: float
    # one estimate per independent scramble, empty for exact values
    replicates: np.ndarray = dataclasses.field(default_factory=lambda: np.empty(0))

    def scaled(self, factor: float) -> 'QmcEstimate':
        return QmcEstimate(self.value * factor, self.std_error * abs(factor), self.replicates * factor)

    def as_array(self) -> np.ndarray | float:
        """Replicates when available, else the value"""
        return self.replicates if self.replicates.size else self.value


def scrambled_sobol(dim: int, log2_points: int, scrambles: int, seed: int) -> np.ndarray:
    """
    Independent Owen-scrambled Sobol point sets

    :param dim: Dimension
    :param log2_points: log2 of the number of points per set
    :param scrambles: Number of independent scrambles
    :param seed: Root seed
    :return: Array of shape (scrambles, 2**log2_points, dim) in (0, 1)
    """
    children = np.random.SeedSequence(seed).spawn(scrambles)
    sets = [
        qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(child)).random_base2(m=log2_points)
        for child in children
    ]
    points = np.stack(sets)
    return np.clip(points, 1e-16, 1 - 1e-16)


def qmc_mean(values: np.ndarray, weights: np.ndarray | None = None) -> QmcEstimate:
    """
    Mean over replicated point sets with the spread across sets as standard error

    :param values: Function values of shape (R, N)
    :param weights: Optional self-normalized importance weights of shape (R, N)
    :return:
    """
    if weights is None:
        per_set = values.mean(axis=1)
    else:
        per_set = (weights * values).sum(axis=1) / weights.sum(axis=1)
    std_error = per_set.std(ddof=1) / np.sqrt(per_set.size) if per_set.size > 1 else 0.0
    return QmcEstimate(float(per_set.mean()), float(std_error), per_set)


def tilted_qmc_mean(
    func: Callable[[np.ndarray], np.ndarray],
    base_points: np.ndarray,
    lam: float,
    lower: np.ndarray | float,
    tilted_points: Callable[[], np.ndarray],
) -> QmcEstimate:
    """
    E func(X) under the tilted product law, from base-law points reweighted by e^(-λ Σ x)

    Falls back to ``tilted_points`` (usually tilted quantiles of the same uniforms) when the
    weights degenerate.

    :param func: Maps points (R, N, d) to values (R, N)
    :param base_points: Base-law points of shape (R, N, d)
    :param lam: Tilt
    :param lower: Support lower bounds, per coordinate or shared
    :param tilted_points: Producer of points drawn from the tilted law
    :return:
    """
    if lam == 0:
        return qmc_mean(func(base_points))
    log_w = -lam * (base_points - lower).sum(axis=-1)
    log_w -= log_w.max(axis=1, keepdims=True)
    weights = np.exp(log_w)
    ess = weights.sum(axis=1) ** 2 / (weights**2).sum(axis=1)
    if ess.min() >= _MIN_ESS_SHARE * base_points.shape[1]:
        return qmc_mean(func(base_points), weights)
    return qmc_mean(func(np.asarray(tilted_points(), dtype=float)))


def xi1_kernel(x: np.ndarray) -> np.ndarray:
    return np.abs(x[..., 0] - x[..., 1]) * np.abs(x[..., 0] - x[..., 2])


def xi1_from_points(x: np.ndarray, weights: np.ndarray | None = None) -> QmcEstimate:
    """
    ξ1 = E|X1 - X2||X1 - X3| from replicated 3-D point sets

    :param x: Points of shape (R, N, 3)
    :param weights: Optional importance weights of shape (R, N)
    :return:
    """
    return qmc_mean(xi1_kernel(x), weights)


def tilted_xi1(
    base_points: np.ndarray,
    lam: float,
    lower: float,
    tilted_ppf: Callable[[np.ndarray], np.ndarray],
    uniforms: np.ndarray,
) -> QmcEstimate:
    """
    ξ1 of the tilted law

    :param base_points: Base-law points of shape (R, N, 3)
    :param lam: Tilt
    :param lower: Support lower bound
    :param tilted_ppf: Quantile function of the tilted law
    :param uniforms: The uniforms behind ``base_points``
    :return:
    """
    return tilted_qmc_mean(xi1_kernel, base_points, lam, lower, lambda: tilted_ppf(uniforms))
