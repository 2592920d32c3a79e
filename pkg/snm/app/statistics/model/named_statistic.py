from snm.app.engine.model.kernel import PairwiseKernel, SquaredPairwiseKernel, TheilKernel
from snm.app.engine.schema.ratio import RatioStatistic
from snm.common.enums import PairFunction, PairNormalization, PopulationStatistic


def gini_statistic(r: float = 0.0, normalization: PairNormalization | str = PairNormalization.gini) -> RatioStatistic:
    """Ĝ = Σ_{i≠j}|X_i - X_j| / (2(n-1) S_n), or the Lorenz form with 2n in place of 2(n-1)"""
    return RatioStatistic(PairwiseKernel(PairFunction.abs_diff, normalization), 1.0, r)


def gini_squared_statistic(r: float = 0.0) -> RatioStatistic:
    """Ĝ², whose fallback is r² on the all-zero sample"""
    return RatioStatistic(SquaredPairwiseKernel(PairNormalization.gini), 2.0, r * r)


def scv_statistic(r: float = 0.0) -> RatioStatistic:
    """ĉ_V² = σ̂² / X̄² with the n - 1 sample variance"""
    return RatioStatistic(PairwiseKernel(PairFunction.squared_diff, PairNormalization.scv), 2.0, r)


def theil_statistic(r: float = 0.0, kernel: TheilKernel | None = None) -> RatioStatistic:
    return RatioStatistic(kernel or TheilKernel(), 1.0, r)


def get_named_statistic(name: PopulationStatistic | str, r: float = 0.0) -> RatioStatistic:
    match PopulationStatistic(name):
        case PopulationStatistic.gini:
            return gini_statistic(r)
        case PopulationStatistic.scv:
            return scv_statistic(r)
        case PopulationStatistic.theil:
            return theil_statistic(r)
