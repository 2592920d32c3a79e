"""
Numerator kernels T of a self-normalized statistic T(X) / S_n^α

A kernel knows three things: its value on samples (for the oracle), its expectation under the
product of tilted laws at one λ (for the engine), and its homogeneity degree d, T(cX) = c^d T(X),
which lets the engine reuse the λ = 0 expectation for scale families.
"""

from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import ClassVar

import numpy as np

from scipy import special

from snm.app.distributions.utils.law import law_cross_gmd
from snm.app.distributions.utils.qmc import scrambled_sobol, tilted_qmc_mean
from snm.app.engine.model.product import ProductLaw
from snm.common.enums import KernelKind, PairFunction, PairNormalization
from snm.common.exception import errors
from snm.core.conf import settings

TiltedValue = float | np.ndarray


class TKernel(ABC):
    kind: ClassVar[KernelKind]
    degree: ClassVar[int] = 1
    # invariant under permutations of the sample
    symmetric: ClassVar[bool] = True

    @property
    def homogeneity(self) -> float | None:
        """d with T(cX) = c^d T(X), None when T is not homogeneous"""
        return None

    @property
    def fixed_power(self) -> float | None:
        """Power α the kernel is defined for, None when any power is allowed"""
        return None

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """T on samples of shape (..., n)"""

    @abstractmethod
    def tilted_expectation(self, product: ProductLaw, lam: float) -> TiltedValue:
        """E T under the product of tilted laws, a scalar or a vector of replicate estimates"""

    def check(self, product: ProductLaw) -> None:
        """Raise when the kernel cannot be evaluated for this product law"""

    def sup_ratio(self, n: int, power: float) -> float | None:
        """sup |T / S^α| over non-negative samples with S > 0, None when unbounded or unknown"""
        return None

    def label(self) -> str:
        return type(self).__name__


def _pair_sum_abs(x: np.ndarray) -> np.ndarray:
    # Σ_{i≠j} |x_i - x_j| = 2 Σ (2i - n + 1) x_(i) over the sorted sample
    n = x.shape[-1]
    coef = 2.0 * np.arange(n) - n + 1.0
    return 2.0 * np.sort(x, axis=-1) @ coef


def _pair_sum_squared(x: np.ndarray) -> np.ndarray:
    # Σ_{i≠j} (x_i - x_j)² = 2n Σ (x_i - x̄)²
    n = x.shape[-1]
    centred = x - x.mean(axis=-1, keepdims=True)
    return 2.0 * n * np.sum(centred**2, axis=-1)


def pair_constant(normalization: PairNormalization | str, n: int) -> float:
    """c(n) in T = c(n) Σ_{i≠j} h(X_i, X_j)"""
    if n < 2:
        return 0.0
    match PairNormalization(normalization):
        case PairNormalization.unit:
            return 1.0
        case PairNormalization.gini:
            return 1.0 / (2.0 * (n - 1))
        case PairNormalization.gini_lorenz:
            return 1.0 / (2.0 * n)
        case PairNormalization.scv:
            return n / (2.0 * (n - 1))


class PairwiseKernel(TKernel):
    """U-statistic kernel c(n) Σ_{i≠j} h(X_i, X_j) with h = |x - y| or (x - y)²"""

    kind = KernelKind.pairwise_u_stat
    degree = 2

    def __init__(self, pair: PairFunction | str, normalization: PairNormalization | str = PairNormalization.unit):
        self.pair = PairFunction(pair)
        self.normalization = PairNormalization(normalization)

    @property
    def homogeneity(self) -> float:
        return 1.0 if self.pair == PairFunction.abs_diff else 2.0

    @property
    def fixed_power(self) -> float | None:
        if self.normalization == PairNormalization.unit:
            return None
        return self.homogeneity

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        c = pair_constant(self.normalization, x.shape[-1])
        pair_sum = _pair_sum_abs(x) if self.pair == PairFunction.abs_diff else _pair_sum_squared(x)
        return c * pair_sum

    def _pair_expectation(self, product: ProductLaw, lam: float, first: int, second: int) -> float:
        a = product.groups[first].model
        if self.pair == PairFunction.abs_diff:
            if first == second:
                return a.tilted_gmd(lam)
            b = product.groups[second].model
            return a.inner.record(law_cross_gmd(a.tilted_law(lam), b.tilted_law(lam), a.config))
        if first == second:
            return 2.0 * a.tilted_variance(lam)
        b = product.groups[second].model
        return (
            a.tilted_variance(lam) + b.tilted_variance(lam) + (a.tilted_mean(lam) - b.tilted_mean(lam)) ** 2
        )

    def tilted_expectation(self, product: ProductLaw, lam: float) -> float:
        # ordered pairs: m_a (m_a - 1) within a group, m_a m_b across groups
        c = pair_constant(self.normalization, product.n)
        if c == 0:
            return 0.0
        total = 0.0
        counts = [g.multiplicity for g in product.groups]
        for a, m_a in enumerate(counts):
            if m_a > 1:
                total += m_a * (m_a - 1) * self._pair_expectation(product, lam, a, a)
            for b in range(a + 1, len(counts)):
                total += 2.0 * m_a * counts[b] * self._pair_expectation(product, lam, a, b)
        return c * total

    def sup_ratio(self, n: int, power: float) -> float | None:
        if power != self.homogeneity or n < 2:
            return None
        # Σ_{i≠j}|x_i - x_j| <= 2(n - 1) S and Σ_{i≠j}(x_i - x_j)² <= 2(n - 1) S²
        return pair_constant(self.normalization, n) * 2.0 * (n - 1)

    def label(self) -> str:
        return f'pairwise[{self.pair.value},{self.normalization.value}]'


class SquaredPairwiseKernel(TKernel):
    """
    (c(n) Σ_{i≠j} |X_i - X_j|)², the numerator of Ĝ² with α = 2

    Under an i.i.d. tilted law its expectation expands over pairs of ordered pairs sharing two,
    one or no index: c²[2n(n-1) ξ2 + 4n(n-1)(n-2) ξ1 + n(n-1)(n-2)(n-3) ξ0].
    """

    kind = KernelKind.pairwise_u_stat
    degree = 4

    def __init__(self, normalization: PairNormalization | str = PairNormalization.gini):
        self.normalization = PairNormalization(normalization)

    @property
    def homogeneity(self) -> float:
        return 2.0

    @property
    def fixed_power(self) -> float:
        return 2.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        c = pair_constant(self.normalization, x.shape[-1])
        return (c * _pair_sum_abs(x)) ** 2

    def check(self, product: ProductLaw) -> None:
        if not product.is_iid:
            raise errors.CapabilityError(msg='The squared pairwise kernel needs an i.i.d. sample')

    def tilted_expectation(self, product: ProductLaw, lam: float) -> TiltedValue:
        n = product.n
        c = pair_constant(self.normalization, n)
        if c == 0:
            return 0.0
        model = product.groups[0].model
        xi2 = 2.0 * model.tilted_variance(lam)
        xi0 = model.tilted_gmd(lam) ** 2
        pairs = n * (n - 1.0)
        value = 2.0 * pairs * xi2 + pairs * (n - 2.0) * (n - 3.0) * xi0
        if n > 2:
            value = value + 4.0 * pairs * (n - 2.0) * model.tilted_xi1(lam).as_array()
        return c * c * value

    def sup_ratio(self, n: int, power: float) -> float | None:
        if power != 2.0 or n < 2:
            return None
        c = pair_constant(self.normalization, n)
        return (c * 2.0 * (n - 1)) ** 2

    def label(self) -> str:
        return f'squared_pairwise[{self.normalization.value}]'


class CoordinateKernel(TKernel):
    """T = X_i for one fixed coordinate"""

    kind = KernelKind.single_sum
    symmetric = False

    def __init__(self, index: int = 0):
        if index < 0:
            raise errors.ConfigError(msg=f'Coordinate index must be non-negative, got {index}')
        self.index = int(index)

    @property
    def homogeneity(self) -> float:
        return 1.0

    def check(self, product: ProductLaw) -> None:
        if self.index >= product.n:
            raise errors.ConfigError(msg=f'Coordinate {self.index} does not exist for n={product.n}')

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return x[..., self.index]

    def tilted_expectation(self, product: ProductLaw, lam: float) -> float:
        return product.group_of(self.index).model.tilted_mean(lam)

    def sup_ratio(self, n: int, power: float) -> float | None:
        return 1.0 if power == 1.0 else None

    def label(self) -> str:
        return f'coordinate[{self.index}]'


class PowerSumKernel(TKernel):
    """T = Σ X_i^k"""

    kind = KernelKind.single_sum

    def __init__(self, order: int):
        if order < 1:
            raise errors.ConfigError(msg=f'Power sum order must be at least 1, got {order}')
        self.order = int(order)

    @property
    def homogeneity(self) -> float:
        return float(self.order)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.sum(x**self.order, axis=-1)

    def tilted_expectation(self, product: ProductLaw, lam: float) -> float:
        return sum(g.multiplicity * g.model.tilted_raw_moment(lam, self.order) for g in product.groups)

    def sup_ratio(self, n: int, power: float) -> float | None:
        return 1.0 if power == self.order else None

    def label(self) -> str:
        return f'power_sum[{self.order}]'


def raw_to_cumulants(raw: list[float]) -> list[float]:
    """κ_1..κ_k from raw moments μ'_1..μ'_k"""
    moments = [1.0, *raw]
    kappa = [0.0]
    for order in range(1, len(moments)):
        value = moments[order]
        for m in range(1, order):
            value -= special.comb(order - 1, m - 1, exact=True) * kappa[m] * moments[order - m]
        kappa.append(value)
    return kappa[1:]


def cumulants_to_raw(kappa: list[float]) -> list[float]:
    """μ'_1..μ'_k from cumulants κ_1..κ_k"""
    cumulants = [0.0, *kappa]
    moments = [1.0]
    for order in range(1, len(cumulants)):
        moments.append(
            sum(special.comb(order - 1, m - 1, exact=True) * cumulants[m] * moments[order - m] for m in range(1, order + 1))
        )
    return moments[1:]


class SumPowerKernel(TKernel):
    """T = S_n^k, the identity numerator: E[S^k / S^k] = P(S > 0)"""

    kind = KernelKind.single_sum

    def __init__(self, order: int = 1):
        if order < 1:
            raise errors.ConfigError(msg=f'Sum power order must be at least 1, got {order}')
        self.order = int(order)

    @property
    def homogeneity(self) -> float:
        return float(self.order)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.sum(x, axis=-1) ** self.order

    def tilted_expectation(self, product: ProductLaw, lam: float) -> float:
        if self.order == 1:
            return sum(g.multiplicity * g.model.tilted_mean(lam) for g in product.groups)
        # cumulants of independent summands add up
        kappa = np.zeros(self.order)
        for group in product.groups:
            raw = [group.model.tilted_raw_moment(lam, j) for j in range(1, self.order + 1)]
            kappa += group.multiplicity * np.asarray(raw_to_cumulants(raw))
        return cumulants_to_raw(kappa.tolist())[-1]

    def sup_ratio(self, n: int, power: float) -> float | None:
        return 1.0 if power == self.order else None

    def label(self) -> str:
        return f'sum_power[{self.order}]'


def theil_numerator(x: np.ndarray) -> np.ndarray:
    """Σ x_i log(n x_i / S) with 0 log 0 = 0, and 0 for the all-zero sample"""
    n = x.shape[-1]
    total = x.sum(axis=-1, keepdims=True)
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(x > 0, x * np.log(n * x / np.where(total > 0, total, 1.0)), 0.0)
    return terms.sum(axis=-1)


class TheilKernel(TKernel):
    """
    T = Σ X_i log(X_i n / S_n), so that T / S_n is the Theil index

    T depends on S_n, so its tilted expectation is an n-dimensional quasi-Monte Carlo average over
    fixed scrambled Sobol nodes; the replicate estimates carry the inner standard error.
    """

    kind = KernelKind.custom

    def __init__(self, log2_points: int | None = None, scrambles: int | None = None, seed: int | None = None):
        self.log2_points = log2_points or settings.THEIL_QMC_LOG2_POINTS
        self.scrambles = scrambles or settings.QMC_SCRAMBLES
        self.seed = settings.QMC_SEED if seed is None else seed
        self._points: dict[int, np.ndarray] = {}
        self._base_points: dict[tuple, np.ndarray] = {}

    @property
    def homogeneity(self) -> float:
        return 1.0

    @property
    def fixed_power(self) -> float:
        return 1.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return theil_numerator(x)

    def uniforms(self, n: int) -> np.ndarray:
        if n not in self._points:
            self._points[n] = scrambled_sobol(n, self.log2_points, self.scrambles, self.seed)
        return self._points[n]

    @staticmethod
    def _map(product: ProductLaw, lam: float, u: np.ndarray) -> np.ndarray:
        if product.is_iid:
            return np.asarray(product.groups[0].model.tilted_law(lam).ppf(u), dtype=float)
        columns = [
            np.asarray(model.tilted_law(lam).ppf(u[..., i]), dtype=float)
            for i, model in enumerate(product.coordinate_models())
        ]
        return np.stack(columns, axis=-1)

    def tilted_expectation(self, product: ProductLaw, lam: float) -> np.ndarray:
        u = self.uniforms(product.n)
        key = product.key
        if key not in self._base_points:
            self._base_points[key] = self._map(product, 0.0, u)
        lower = np.array([model.lower for model in product.coordinate_models()])
        estimate = tilted_qmc_mean(
            theil_numerator, self._base_points[key], lam, lower, lambda: self._map(product, lam, u)
        )
        return estimate.replicates

    def sup_ratio(self, n: int, power: float) -> float | None:
        return float(np.log(n)) if power == 1.0 else None

    def label(self) -> str:
        return 'theil'


class CustomKernel(TKernel):
    """User kernel given by its tilted expectation and, optionally, its sample values"""

    kind = KernelKind.custom

    def __init__(
        self,
        tilted: Callable[[ProductLaw, float], TiltedValue],
        evaluate: Callable[[np.ndarray], np.ndarray] | None = None,
        *,
        homogeneity: float | None = None,
        power: float | None = None,
        bound: float | None = None,
        degree: int = 1,
        symmetric: bool = False,
        name: str = 'custom',
    ):
        self._tilted = tilted
        self.symmetric = symmetric
        self._evaluate = evaluate
        self._homogeneity = homogeneity
        self._power = power
        self._bound = bound
        self.degree = degree
        self.name = name
        if evaluate is not None and np.any(np.asarray(evaluate(np.zeros((1, 2)))) != 0):
            raise errors.ConfigError(msg=f'Kernel {name} must vanish at the zero sample')

    @property
    def homogeneity(self) -> float | None:
        return self._homogeneity

    @property
    def fixed_power(self) -> float | None:
        return self._power

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        if self._evaluate is None:
            raise errors.CapabilityError(msg=f'Kernel {self.name} has no sample evaluation')
        return np.asarray(self._evaluate(x), dtype=float)

    def tilted_expectation(self, product: ProductLaw, lam: float) -> TiltedValue:
        return self._tilted(product, lam)

    def sup_ratio(self, n: int, power: float) -> float | None:
        return self._bound

    def label(self) -> str:
        return self.name
