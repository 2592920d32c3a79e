"""
Closed forms for Gamma(α, 1) samples

ξ1 of Gamma(α, 1) has no closed form and is passed in; every other ingredient is exact.
"""

import math

from scipy import special

from snm.common.exception import errors


def _check(shape: float, n: int) -> None:
    if not (shape > 0 and math.isfinite(shape)):
        raise errors.DomainError(msg=f'Gamma shape must be positive, got {shape!r}')
    if n < 2:
        raise errors.ConfigError(msg=f'Sample size must be at least 2, got {n}')


def _half_shift_constant(shape: float) -> float:
    # Γ²(α + 1/2) / (π Γ²(α))
    return math.exp(2.0 * (special.gammaln(shape + 0.5) - special.gammaln(shape))) / math.pi


def gamma_gini(shape: float) -> float:
    """G(α) = Γ(α + 1/2) / (√π Γ(α + 1))"""
    return math.exp(special.gammaln(shape + 0.5) - special.gammaln(shape + 1.0)) / math.sqrt(math.pi)


def gamma_gini_second_moment(shape: float, n: int, xi1: float) -> float:
    """E Ĝ² for a Gamma(α, 1) sample of size n"""
    _check(shape, n)
    a = shape
    denominator = a * (n - 1.0) * (a * n + 1.0)
    return (
        1.0 / ((n - 1.0) * (a * n + 1.0))
        + (n - 2.0) * xi1 / denominator
        + (n - 2.0) * (n - 3.0) * _half_shift_constant(a) / denominator
    )


def gamma_gini_variance(shape: float, n: int, xi1: float) -> float:
    """Var Ĝ for a Gamma(α, 1) sample of size n, the ξ1 term vanishes at n = 2"""
    _check(shape, n)
    a = shape
    head = 1.0 / ((n - 1.0) * (a * n + 1.0)) + (n - 2.0) * xi1 / (a * (n - 1.0) * (a * n + 1.0))
    tail = ((1.0 + 4.0 * a) * n - (6.0 * a + 1.0)) / ((n - 1.0) * (n * a + 1.0))
    return head - tail * _half_shift_constant(a) / (a * a)


def gamma_scv_expectation(shape: float, n: int) -> float:
    """E ĉ_V² = n / (αn + 1), for any Gamma scale"""
    _check(shape, n)
    return n / (shape * n + 1.0)


def gamma_scv_ratio(shape: float, n: int) -> float:
    """R_V = αn / (αn + 1)"""
    return shape * gamma_scv_expectation(shape, n)


def gamma_theil_expectation(shape: float, n: int) -> float:
    """E of the sample Theil index, log n + ψ(α + 1) - ψ(nα + 1), since X_i / S_n ~ Beta(α, (n - 1)α)"""
    if not (shape > 0 and math.isfinite(shape)):
        raise errors.DomainError(msg=f'Gamma shape must be positive, got {shape!r}')
    if n < 1:
        raise errors.ConfigError(msg=f'Sample size must be at least 1, got {n}')
    return math.log(n) + float(special.digamma(shape + 1.0) - special.digamma(n * shape + 1.0))
