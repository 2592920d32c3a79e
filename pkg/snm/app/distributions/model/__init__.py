from functools import lru_cache

from snm.app.distributions.model.base import FamilyModel
from snm.app.distributions.model.discrete import BernoulliModel, NegativeBinomialModel, PoissonModel, PointMassModel
from snm.app.distributions.model.gamma import ExponentialModel, GammaModel
from snm.app.distributions.model.inverse_gaussian import InverseGaussianModel
from snm.app.distributions.model.lognormal import LognormalModel
from snm.app.distributions.model.pareto import ParetoModel
from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.quadrature.schema.quadrature import QuadratureConfig
from snm.common.enums import DistributionFamily

FAMILY_MODELS: dict[DistributionFamily, type[FamilyModel]] = {
    model.family: model
    for model in (
        GammaModel,
        ExponentialModel,
        ParetoModel,
        PoissonModel,
        BernoulliModel,
        NegativeBinomialModel,
        LognormalModel,
        InverseGaussianModel,
        PointMassModel,
    )
}


@lru_cache(maxsize=512)
def get_family_model(spec: DistributionSpec, config: QuadratureConfig | None = None) -> FamilyModel:
    """Shared model instance per (spec, config), so tilted-law memos are reused"""
    return FAMILY_MODELS[spec.family](spec, config or QuadratureConfig())
