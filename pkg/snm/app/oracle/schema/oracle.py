import dataclasses
import math


@dataclasses.dataclass(frozen=True)
class OracleEstimate:
    """Monte Carlo mean with std_error = sample std / √replications"""

    mean: float
    std_error: float
    replications: int
    seed: int
    sample_variance: float = 0.0
    variance_std_error: float = 0.0

    def within(self, value: float, sigmas: float = 3.0, extra: float = 0.0) -> bool:
        """|value - mean| <= sigmas · sqrt(std_error² + extra²)"""
        return abs(value - self.mean) <= sigmas * math.hypot(self.std_error, extra)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class EnumerationResult:
    """Exact expectation over a truncated product space"""

    value: float
    truncation_bound: float
    omitted_mass: float
    outcomes: int

    def within(self, value: float, tolerance: float = 0.0) -> bool:
        return abs(value - self.value) <= self.truncation_bound + tolerance
