import dataclasses
import math
import re

from snm.common.enums import DistributionFamily, SupportKind, TiltedMoment
from snm.common.exception import errors


@dataclasses.dataclass(frozen=True)
class ParameterDef:
    name: str
    default: float | None = None
    lower: float = -math.inf
    lower_open: bool = True
    upper: float = math.inf
    upper_open: bool = True
    aliases: tuple[str, ...] = ()
    reciprocal_aliases: tuple[str, ...] = ()

    def accepts(self, value: float) -> bool:
        if not math.isfinite(value):
            return False
        above = value > self.lower if self.lower_open else value >= self.lower
        below = value < self.upper if self.upper_open else value <= self.upper
        return above and below

    def describe(self) -> str:
        left = '(' if self.lower_open else '['
        right = ')' if self.upper_open else ']'
        return f'{self.name} in {left}{self.lower}, {self.upper}{right}'


FAMILY_PARAMETERS: dict[DistributionFamily, tuple[ParameterDef, ...]] = {
    DistributionFamily.gamma: (
        ParameterDef('shape', lower=0.0, aliases=('alpha', 'a', 'k')),
        ParameterDef('scale', default=1.0, lower=0.0, aliases=('beta', 'theta'), reciprocal_aliases=('rate',)),
    ),
    DistributionFamily.exponential: (
        ParameterDef('rate', default=1.0, lower=0.0, aliases=('lambda',), reciprocal_aliases=('scale',)),
    ),
    DistributionFamily.pareto: (
        ParameterDef('shape', lower=1.0, aliases=('alpha', 'a')),
        ParameterDef('scale', default=1.0, lower=0.0, aliases=('xm', 'x_m')),
    ),
    DistributionFamily.poisson: (ParameterDef('mu', lower=0.0, aliases=('mean', 'lam', 'rate')),),
    DistributionFamily.bernoulli: (ParameterDef('p', lower=0.0, upper=1.0, upper_open=False),),
    DistributionFamily.negative_binomial: (
        ParameterDef('k', lower=0.0, aliases=('n', 'size')),
        ParameterDef('p', lower=0.0, upper=1.0),
    ),
    DistributionFamily.lognormal: (
        ParameterDef('sigma', lower=0.0, aliases=('s',)),
        ParameterDef('mu', default=0.0),
    ),
    DistributionFamily.inverse_gaussian: (
        ParameterDef('mean', lower=0.0, aliases=('mu', 'm')),
        ParameterDef('shape', default=1.0, lower=0.0, aliases=('lambda',)),
    ),
    DistributionFamily.pointmass: (ParameterDef('value', lower=0.0, lower_open=False, aliases=('c', 'at')),),
}

FAMILY_ALIASES: dict[str, DistributionFamily] = {
    'exp': DistributionFamily.exponential,
    'expon': DistributionFamily.exponential,
    'negbin': DistributionFamily.negative_binomial,
    'nbinom': DistributionFamily.negative_binomial,
    'negativebinomial': DistributionFamily.negative_binomial,
    'lognorm': DistributionFamily.lognormal,
    'invgauss': DistributionFamily.inverse_gaussian,
    'inversegaussian': DistributionFamily.inverse_gaussian,
    'ig': DistributionFamily.inverse_gaussian,
    'wald': DistributionFamily.inverse_gaussian,
    'point_mass': DistributionFamily.pointmass,
    'dirac': DistributionFamily.pointmass,
}

DISCRETE_FAMILIES = frozenset({
    DistributionFamily.poisson,
    DistributionFamily.bernoulli,
    DistributionFamily.negative_binomial,
    DistributionFamily.pointmass,
})

_SPEC_PATTERN = re.compile(r'^\s*([A-Za-z_][\w-]*)\s*(?:\((.*)\))?\s*$')


def resolve_family(name: str | DistributionFamily) -> DistributionFamily:
    if isinstance(name, DistributionFamily):
        return name
    key = str(name).strip().lower().replace('-', '_')
    if key in FAMILY_ALIASES:
        return FAMILY_ALIASES[key]
    try:
        return DistributionFamily(key)
    except ValueError:
        raise errors.ConfigError(
            msg=f'Unknown distribution family {name!r}', data={'known': DistributionFamily.get_member_values()}
        ) from None


def primary_parameter(family: DistributionFamily) -> str:
    """Parameter swept by curve commands"""
    return FAMILY_PARAMETERS[family][0].name


def parameter_definition(family: DistributionFamily, name: str) -> tuple[ParameterDef, bool]:
    """
    Look up a parameter by name or alias

    :param family: Distribution family
    :param name: Canonical name, alias or reciprocal alias
    :return: The definition and whether ``name`` is its reciprocal
    """
    for definition in FAMILY_PARAMETERS[family]:
        if name == definition.name or name in definition.aliases:
            return definition, False
        if name in definition.reciprocal_aliases:
            return definition, True
    raise errors.ConfigError(
        msg=f'{family.value} has no parameter {name!r}', data={'known': [d.name for d in FAMILY_PARAMETERS[family]]}
    )


@dataclasses.dataclass(frozen=True)
class DistributionSpec:
    """Named non-negative distribution with canonical parameters"""

    family: DistributionFamily
    params: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        family = resolve_family(self.family)
        object.__setattr__(self, 'family', family)
        object.__setattr__(self, 'params', _canonical_params(family, dict(self.params)))

    @classmethod
    def create(cls, family: str | DistributionFamily, **params: float) -> 'DistributionSpec':
        return cls(resolve_family(family), tuple(params.items()))

    @classmethod
    def parse(cls, text: str, overrides: dict[str, float] | None = None) -> 'DistributionSpec':
        """
        Parse the text form ``family(name=value, ...)``

        A single positional value binds to the family's first parameter, e.g. ``pointmass(1)``.
        Overrides fill in or replace parameters, which is how parameter grids are swept.

        :param text: Spec text such as ``gamma(shape=2,scale=1)``
        :param overrides: Parameter values applied after parsing
        :return:
        """
        match = _SPEC_PATTERN.match(text or '')
        if not match:
            raise errors.ConfigError(msg=f'Invalid distribution spec {text!r}')
        family = resolve_family(match.group(1))
        definitions = FAMILY_PARAMETERS[family]
        params: dict[str, float] = {}
        body = (match.group(2) or '').strip()
        if body:
            for position, token in enumerate(part.strip() for part in body.split(',')):
                if not token:
                    continue
                if '=' in token:
                    key, raw = (piece.strip() for piece in token.split('=', 1))
                else:
                    if position >= len(definitions):
                        raise errors.ConfigError(msg=f'Too many positional parameters in {text!r}')
                    key, raw = definitions[position].name, token
                try:
                    params[key] = float(raw)
                except ValueError:
                    raise errors.ConfigError(msg=f'Parameter {key!r} in {text!r} is not a number') from None
        for key, value in (overrides or {}).items():
            for definition in definitions:
                if key == definition.name or key in definition.aliases or key in definition.reciprocal_aliases:
                    params = {
                        k: v
                        for k, v in params.items()
                        if k != definition.name and k not in definition.aliases and k not in definition.reciprocal_aliases
                    }
            params[key] = float(value)
        return cls(family, tuple(params.items()))

    @property
    def support_kind(self) -> SupportKind:
        return SupportKind.discrete if self.family in DISCRETE_FAMILIES else SupportKind.continuous

    def param(self, name: str) -> float:
        return dict(self.params)[name]

    def as_dict(self) -> dict[str, float]:
        return dict(self.params)

    def text(self) -> str:
        body = ','.join(f'{k}={v!r}' for k, v in self.params)
        return f'{self.family.value}({body})'

    def __str__(self) -> str:
        return self.text()


def _canonical_params(family: DistributionFamily, raw: dict[str, float]) -> tuple[tuple[str, float], ...]:
    canonical: dict[str, float] = {}
    remaining = dict(raw)
    for definition in FAMILY_PARAMETERS[family]:
        found = [key for key in (definition.name, *definition.aliases) if key in remaining]
        found_reciprocal = [key for key in definition.reciprocal_aliases if key in remaining]
        if len(found) + len(found_reciprocal) > 1:
            raise errors.ConfigError(msg=f'Parameter {definition.name!r} of {family.value} given more than once')
        if found:
            value = float(remaining.pop(found[0]))
        elif found_reciprocal:
            inverse = float(remaining.pop(found_reciprocal[0]))
            if not inverse > 0:
                raise errors.DomainError(msg=f'{found_reciprocal[0]} must be positive for {family.value}')
            value = 1.0 / inverse
        elif definition.default is not None:
            value = definition.default
        else:
            raise errors.ConfigError(msg=f'Missing parameter {definition.name!r} for {family.value}')
        if not definition.accepts(value):
            raise errors.DomainError(
                msg=f'{family.value}: {definition.describe()}, got {value!r}',
                data={'family': family.value, definition.name: value},
            )
        canonical[definition.name] = value
    if remaining:
        raise errors.ConfigError(msg=f'Unknown parameters for {family.value}: {sorted(remaining)}')
    return tuple(canonical.items())


@dataclasses.dataclass(frozen=True)
class TiltedView:
    """Exponentially tilted law dF(x) e^(-λx) / L(λ)"""

    base: DistributionSpec
    lam: float

    def __post_init__(self) -> None:
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise errors.DomainError(msg=f'Tilt parameter must be finite and non-negative, got {self.lam!r}')


@dataclasses.dataclass(frozen=True)
class TiltedMomentSet:
    mean: float | None = None
    variance: float | None = None
    gmd: float | None = None
    xi1: float | None = None
    xi0: float | None = None
    xi2: float | None = None
    xi1_std_error: float | None = None

    @property
    def requested(self) -> frozenset[TiltedMoment]:
        return frozenset(m for m in TiltedMoment if getattr(self, m.value) is not None)
