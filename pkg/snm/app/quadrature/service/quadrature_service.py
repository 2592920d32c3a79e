from collections.abc import Callable

import numpy as np

from scipy import special

from snm.app.quadrature.schema.quadrature import IntegralResult, QuadratureConfig
from snm.app.quadrature.utils.gauss_kronrod import adaptive_gauss_kronrod
from snm.common.enums import TransformType
from snm.common.exception import errors
from snm.common.log import log

Integrand = Callable[[np.ndarray], np.ndarray]

# both maps stop at lambda = scale / eps, the reach of the rational map in double precision
_LAMBDA_REACH = 1.0 / np.finfo(float).eps


def _checked(f: Integrand, lam: np.ndarray) -> np.ndarray:
    values = np.asarray(f(lam), dtype=float)
    finite = np.isfinite(values)
    if not finite.all():
        bad = np.argwhere(~finite)[0][0]
        raise errors.EvaluationError(
            msg=f'Integrand is not finite at lambda={lam[bad]!r}',
            data={'lambda': float(lam[bad])},
        )
    return values


def _times(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return values * (weights if values.ndim == 1 else weights[:, None])


def _on_unit_interval(
    f: Integrand,
    t: np.ndarray,
    to_lambda: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    scale: float,
) -> np.ndarray:
    # nodes at or beyond the reach, including t rounded onto 1, carry zero weight
    inside = t < 1.0
    safe_t = np.where(inside, t, 0.0)
    with np.errstate(divide='ignore', over='ignore'):
        lam = to_lambda(safe_t)
        weight = jacobian(safe_t)
    inside &= np.isfinite(weight) & (lam < scale * _LAMBDA_REACH)
    values = _checked(f, np.where(inside, lam, scale))
    return _times(values, np.where(inside, weight, 0.0))


class QuadratureService:
    """Adaptive integration over [0, inf) and finite intervals"""

    @staticmethod
    def integrate_semi_infinite(f: Integrand, config: QuadratureConfig, *, scale: float = 1.0) -> IntegralResult:
        """
        Integrate f over (0, inf)

        The integrand is evaluated on whole node arrays. Vector-valued integrands (output shape (m, k))
        are integrated component-wise and reported through ``components``.

        :param f: Vectorized integrand in lambda
        :param config: Quadrature configuration
        :param scale: Characteristic lambda scale of the integrand, used by the change of variable
        :return:
        """
        if not scale > 0 or not np.isfinite(scale):
            scale = 1.0

        match TransformType(config.transform):
            case TransformType.rational_map:

                def mapped(t: np.ndarray) -> np.ndarray:
                    return _on_unit_interval(
                        f, t, lambda s: scale * s / (1.0 - s), lambda s: scale / (1.0 - s) ** 2, scale
                    )

                a, b = 0.0, 1.0
            case TransformType.log_map:

                # lambda = scale (e^u - 1) with u = t / (1 - t), logarithmic spacing in the tail
                def mapped(t: np.ndarray) -> np.ndarray:
                    return _on_unit_interval(
                        f,
                        t,
                        lambda s: scale * np.expm1(s / (1.0 - s)),
                        lambda s: scale * np.exp(s / (1.0 - s)) / (1.0 - s) ** 2,
                        scale,
                    )

                a, b = 0.0, 1.0
            case TransformType.none_with_truncation:

                def mapped(t: np.ndarray) -> np.ndarray:
                    return _checked(f, t)

                a, b = 0.0, float(config.truncation_lambda_max)

        return QuadratureService._run(mapped, a, b, config)

    @staticmethod
    def integrate_interval(f: Integrand, a: float, b: float, config: QuadratureConfig) -> IntegralResult:
        """
        Integrate f over the finite interval [a, b]

        :param f: Vectorized integrand
        :param a: Lower limit
        :param b: Upper limit
        :param config: Quadrature configuration, the transform is ignored
        :return:
        """
        if not (np.isfinite(a) and np.isfinite(b)):
            raise errors.ConfigError(msg='integrate_interval needs finite limits', data={'a': a, 'b': b})
        if a == b:
            return IntegralResult(value=0.0, error_estimate=0.0, subdivisions_used=0, converged=True)
        if a > b:
            return QuadratureService.integrate_interval(f, b, a, config).scaled(-1.0)
        return QuadratureService._run(lambda x: _checked(f, x), a, b, config)

    @staticmethod
    def integrate_with_power_weight(
        g: Integrand,
        power_exponent: float,
        config: QuadratureConfig,
        *,
        scale: float = 1.0,
    ) -> IntegralResult:
        """
        Compute (1/Γ(α)) ∫ λ^(α-1) g(λ) dλ over (0, inf)

        For α < 1 the substitution u = λ^α removes the singular weight, for α >= 1 the weight is
        applied in log space at the nodes.

        :param g: Vectorized function bounded near zero
        :param power_exponent: α > 0
        :param config: Quadrature configuration
        :param scale: Characteristic lambda scale
        :return:
        """
        alpha = float(power_exponent)
        if not alpha > 0:
            raise errors.ConfigError(msg=f'power_exponent must be positive, got {alpha}')

        if alpha < 1:
            inv = 1.0 / alpha
            if TransformType(config.transform) == TransformType.none_with_truncation:
                config = config.model_copy(update={'truncation_lambda_max': config.truncation_lambda_max**alpha})
            result = QuadratureService.integrate_semi_infinite(
                lambda u: g(np.power(u, inv)), config, scale=scale**alpha
            )
            return result.scaled(1.0 / special.gamma(alpha + 1.0))

        if alpha == 1:
            return QuadratureService.integrate_semi_infinite(g, config, scale=scale)

        log_norm = special.gammaln(alpha)

        def weighted(lam: np.ndarray) -> np.ndarray:
            values = np.asarray(g(lam), dtype=float)
            with np.errstate(divide='ignore'):
                weight = np.exp((alpha - 1.0) * np.log(lam) - log_norm)
            return _times(values, weight)

        return QuadratureService.integrate_semi_infinite(weighted, config, scale=scale)

    @staticmethod
    def _run(f: Integrand, a: float, b: float, config: QuadratureConfig) -> IntegralResult:
        outcome = adaptive_gauss_kronrod(
            f,
            a,
            b,
            rel_tol=config.rel_tol,
            abs_tol=config.abs_tol,
            max_intervals=config.max_subdivisions,
            initial_intervals=config.initial_intervals,
        )
        value = outcome.value
        if not outcome.converged:
            log.debug(
                'Quadrature stopped at {} intervals, error {:.3e} for value {}',
                outcome.intervals,
                outcome.error,
                value.tolist(),
            )
        return IntegralResult(
            value=float(value.mean()),
            error_estimate=outcome.error,
            subdivisions_used=outcome.intervals,
            converged=outcome.converged,
            evaluations=outcome.evaluations,
            components=tuple(float(v) for v in value) if value.size > 1 else (),
        )


quadrature_service: QuadratureService = QuadratureService()
