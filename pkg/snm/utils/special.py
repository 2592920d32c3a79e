import math

import numpy as np

from scipy import special

# Below this z the power series is used, above it the continued fraction
_SERIES_CUTOFF = 1.5
_SERIES_TERMS = 80
_CF_MAX_ITER = 2000
_CF_EPS = 1e-16
_FPMIN = 1e-300
_INTEGER_SNAP = 1e-9


def upper_gamma_scaled(s: float, z: np.ndarray | float) -> np.ndarray:
    """
    Scaled upper incomplete gamma Q(s, z) = e^z z^(-s) Γ(s, z)

    Valid for any real s and z >= 0. Q(s, 0) = 1/(-s) for s < 0 and +inf otherwise.
    Satisfies z Q(s+1, z) = s Q(s, z) + 1.

    :param s: Real order
    :param z: Non-negative argument(s)
    :return:
    """
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    zero = z == 0
    large = z >= _SERIES_CUTOFF
    small = ~zero & ~large

    out[zero] = 1.0 / (-s) if s < 0 else np.inf
    if np.any(large):
        out[large] = _continued_fraction(s, z[large])
    if np.any(small):
        out[small] = _series(s, z[small])
    return out


def log_upper_gamma(s: float, z: np.ndarray | float) -> np.ndarray:
    """log Γ(s, z) for z > 0"""
    z = np.asarray(z, dtype=float)
    return np.log(upper_gamma_scaled(s, z)) - z + s * np.log(z)


def _continued_fraction(s: float, z: np.ndarray) -> np.ndarray:
    # modified Lentz on Γ(s,z) = e^-z z^s / (z+1-s - 1(1-s)/(z+3-s - 2(2-s)/(z+5-s - ...)))
    b = z + 1.0 - s
    c = np.full_like(z, 1.0 / _FPMIN)
    d = 1.0 / np.where(np.abs(b) < _FPMIN, _FPMIN, b)
    h = d.copy()
    active = np.ones(z.shape, dtype=bool)
    for i in range(1, _CF_MAX_ITER + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _CF_EPS
        if not active.any():
            break
    return h


def _series(s: float, z: np.ndarray) -> np.ndarray:
    m = round(s)
    if abs(s - m) < _INTEGER_SNAP:
        return _integer_order(int(m), z)

    # Γ(s,z) = Γ(s) - z^s Σ (-z)^k / (k! (s+k)), multiplied through by e^z z^-s
    k = np.arange(_SERIES_TERMS, dtype=float)
    log_fact = special.gammaln(k + 1.0)
    terms = np.power.outer(-z, k) * np.exp(-log_fact) / (s + k)
    return np.exp(z) * (np.power(z, -s) * special.gamma(s) - terms.sum(axis=-1))


def _integer_order(m: int, z: np.ndarray) -> np.ndarray:
    if m == 0:
        return np.exp(z) * special.exp1(z)
    if m > 0:
        # Γ(m,z) = (m-1)! e^-z Σ_{k<m} z^k/k!
        total = np.zeros_like(z)
        for k in range(m):
            total += z**k / math.factorial(k)
        return math.factorial(m - 1) * np.power(z, -float(m)) * total

    # Γ(-p,z) = (-1)^p/p! [E1(z) - e^-z Σ_{k<p} (-1)^k k! z^-(k+1)]
    p = -m
    total = np.zeros_like(z)
    for k in range(p):
        total += (-1) ** k * math.factorial(k) * np.power(z, p - k - 1.0)
    return (-1) ** p / math.factorial(p) * (np.exp(z) * np.power(z, float(p)) * special.exp1(z) - total)
