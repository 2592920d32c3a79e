import dataclasses

from collections.abc import Sequence

import numpy as np

from snm.app.distributions.model import FamilyModel, get_family_model
from snm.app.distributions.schema.distribution import DistributionSpec
from snm.app.quadrature.schema.quadrature import InnerAccuracy, QuadratureConfig
from snm.common.exception import errors


@dataclasses.dataclass(frozen=True)
class ComponentGroup:
    """Distinct law and how many sample coordinates follow it"""

    model: FamilyModel
    multiplicity: int

    @property
    def spec(self) -> DistributionSpec:
        return self.model.spec


class ProductLaw:
    """
    Law of an independent sample (X_1, ..., X_n), stored as distinct laws with multiplicities

    Coordinates keep the order in which they were given, ``group_of(i)`` maps coordinate i to its group.
    """

    def __init__(self, groups: Sequence[ComponentGroup], coordinate_groups: np.ndarray) -> None:
        self.groups = tuple(groups)
        self.coordinate_groups = coordinate_groups
        self.n = int(sum(g.multiplicity for g in self.groups))

    @classmethod
    def iid(cls, dist: DistributionSpec, n: int, config: QuadratureConfig) -> 'ProductLaw':
        if n < 1:
            raise errors.ConfigError(msg=f'Sample size must be at least 1, got {n}')
        return cls([ComponentGroup(get_family_model(dist, config), int(n))], np.zeros(int(n), dtype=int))

    @classmethod
    def independent(cls, dists: Sequence[DistributionSpec], config: QuadratureConfig) -> 'ProductLaw':
        if not dists:
            raise errors.ConfigError(msg='At least one distribution is required')
        order: dict[DistributionSpec, int] = {}
        counts: list[int] = []
        coordinate_groups = np.empty(len(dists), dtype=int)
        for position, dist in enumerate(dists):
            if dist not in order:
                order[dist] = len(order)
                counts.append(0)
            index = order[dist]
            counts[index] += 1
            coordinate_groups[position] = index
        groups = [ComponentGroup(get_family_model(dist, config), counts[i]) for dist, i in order.items()]
        return cls(groups, coordinate_groups)

    @property
    def is_iid(self) -> bool:
        return len(self.groups) == 1

    def group_of(self, coordinate: int) -> ComponentGroup:
        return self.groups[int(self.coordinate_groups[coordinate])]

    def coordinate_models(self) -> list[FamilyModel]:
        return [self.groups[g].model for g in self.coordinate_groups]

    def log_laplace(self, lam: np.ndarray) -> np.ndarray:
        """Σ m_a log L_a(λ)"""
        total = np.zeros_like(np.asarray(lam, dtype=float))
        for group in self.groups:
            total = total + group.multiplicity * group.model.log_laplace(lam)
        return total

    def zero_mass(self) -> float:
        """P(X_1 = ... = X_n = 0)"""
        return float(np.prod([g.model.zero_mass() ** g.multiplicity for g in self.groups]))

    def mean_sum(self) -> float:
        return float(sum(g.multiplicity * g.model.mean() for g in self.groups))

    @property
    def scale_key(self) -> tuple | None:
        """Shared scale-family key of all groups, None when they do not share one"""
        keys = {g.model.scale_key for g in self.groups}
        if len(keys) != 1:
            return None
        return keys.pop()

    def tilted_scale(self, lam: np.ndarray) -> np.ndarray | None:
        if self.scale_key is None:
            return None
        return self.groups[0].model.tilted_scale(lam)

    def inner_accuracy(self) -> InnerAccuracy:
        """Inner integral diagnostics merged over the distinct laws"""
        accuracy = InnerAccuracy()
        for group in self.groups:
            accuracy = accuracy.merge(group.model.inner)
        return accuracy

    @property
    def key(self) -> tuple:
        return tuple((g.spec, g.multiplicity) for g in self.groups), tuple(self.coordinate_groups.tolist())

    def describe(self) -> str:
        return ' x '.join(f'{g.spec.text()}^{g.multiplicity}' for g in self.groups)
