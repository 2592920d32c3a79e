from enum import Enum
from enum import IntEnum as SourceIntEnum
from typing import Any, TypeVar

T = TypeVar('T', bound=Enum)


class _EnumBase:
    """Enum base class providing common methods"""

    @classmethod
    def get_member_keys(cls) -> list[str]:
        """Get list of enum member names"""
        return list(cls.__members__.keys())

    @classmethod
    def get_member_values(cls) -> list:
        """Get list of enum member values"""
        return [item.value for item in cls.__members__.values()]

    @classmethod
    def get_member_dict(cls) -> dict[str, Any]:
        """Get dictionary of enum members"""
        return {name: item.value for name, item in cls.__members__.items()}


class IntEnum(_EnumBase, SourceIntEnum):
    """Integer enum base class"""


class StrEnum(_EnumBase, str, Enum):
    """String enum base class, printed and formatted as its value"""

    __str__ = str.__str__
    __format__ = str.__format__


class ExitCode(IntEnum):
    """CLI exit status"""

    success = 0
    validation_failure = 1
    config_error = 2


class TransformType(StrEnum):
    """Change of variable mapping [0, inf) onto a finite interval"""

    rational_map = 'rational_map'
    log_map = 'log_map'
    none_with_truncation = 'none_with_truncation'


class DistributionFamily(StrEnum):
    """Non-negative distribution family"""

    gamma = 'gamma'
    exponential = 'exponential'
    pareto = 'pareto'
    poisson = 'poisson'
    bernoulli = 'bernoulli'
    negative_binomial = 'negative_binomial'
    lognormal = 'lognormal'
    inverse_gaussian = 'inverse_gaussian'
    pointmass = 'pointmass'


class SupportKind(StrEnum):
    """Support type"""

    continuous = 'continuous'
    discrete = 'discrete'


class TiltedMoment(StrEnum):
    """Functional of a tilted law"""

    mean = 'mean'
    variance = 'variance'
    gmd = 'gmd'
    xi1 = 'xi1'


class PopulationStatistic(StrEnum):
    """Population inequality statistic"""

    gini = 'gini'
    scv = 'scv'
    theil = 'theil'


class KernelKind(StrEnum):
    """Numerator kernel shape"""

    pairwise_u_stat = 'pairwise_u_stat'
    single_sum = 'single_sum'
    custom = 'custom'


class PairFunction(StrEnum):
    """Pairwise kernel h(x, y)"""

    abs_diff = 'abs_diff'
    squared_diff = 'squared_diff'


class PairNormalization(StrEnum):
    """Constant c(n) in front of the sum over ordered pairs"""

    unit = 'unit'
    gini = 'gini'  # 1 / (2(n - 1))
    gini_lorenz = 'gini_lorenz'  # 1 / (2n)
    scv = 'scv'  # n / (2(n - 1))


class EstimatorMethod(StrEnum):
    """Gini estimator"""

    plain = 'plain'
    mle_debiased = 'mle_debiased'
    mom_debiased = 'mom_debiased'
    mle_plugin = 'mle_plugin'
    mom_plugin = 'mom_plugin'


class ExperimentCommand(StrEnum):
    """Experiment command"""

    bias_curve = 'bias-curve'
    variance_curve = 'variance-curve'
    scv_curve = 'scv-curve'
    debias_experiment = 'debias-experiment'
    validate = 'validate'
    moment = 'moment'


class OutputFormat(StrEnum):
    """Experiment output format"""

    csv = 'csv'
    json = 'json'
    svg_csv = 'svg+csv'
