import dataclasses

from snm.common.enums import EstimatorMethod


@dataclasses.dataclass(frozen=True)
class ParetoFit:
    """Fitted Pareto shape: the formula value and the value used downstream"""

    raw: float
    alpha: float
    clamped: bool


@dataclasses.dataclass(frozen=True)
class EstimatorResult:
    method: EstimatorMethod
    value: float
    fitted_param: float | None = None
    clamped: bool = False

    def as_dict(self) -> dict:
        return {**dataclasses.asdict(self), 'method': EstimatorMethod(self.method).value}
