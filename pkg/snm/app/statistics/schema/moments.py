import dataclasses

from pydantic import Field

from snm.app.engine.schema.ratio import MomentResult
from snm.common.schema import SchemaBase


@dataclasses.dataclass(frozen=True)
class GiniExpectation:
    expected: float
    # None when the population Gini is zero
    ratio_R: float | None
    population_G: float
    moment: MomentResult


@dataclasses.dataclass(frozen=True)
class GiniSecondMoment:
    second_moment: float
    variance: float
    expected: float
    moment: MomentResult


@dataclasses.dataclass(frozen=True)
class ScvExpectation:
    expected: float
    ratio_RV: float | None
    population_cv2: float
    moment: MomentResult


@dataclasses.dataclass(frozen=True)
class TheilExpectation:
    expected: float
    std_error: float
    population_T: float
    moment: MomentResult


class MomentReportBase(SchemaBase):
    """Common row fields of the moment reports"""

    distribution: str = Field(description='Distribution spec text')
    n: int = Field(description='Sample size')
    r: float = Field(0.0, description='Fallback value on the all-zero sample')
    quad_error: float = Field(description='Quadrature error estimate of the expectation')
    converged: bool = Field(description='Quadrature reached the tolerance')


class GiniMomentReport(MomentReportBase):
    """First and second moment of the sample Gini coefficient"""

    population_G: float
    expected: float
    ratio_R: float | None = None
    second_moment: float | None = None
    variance: float | None = None
    inner_std_error: float | None = Field(None, description='Spread of the ξ1 estimate in the second moment')


class ScvMomentReport(MomentReportBase):
    """Expectation of the sample squared coefficient of variation"""

    population_cv2: float
    expected: float
    ratio_RV: float | None = None


class TheilMomentReport(MomentReportBase):
    """Expectation of the sample Theil index"""

    population_T: float
    expected: float
    inner_std_error: float
