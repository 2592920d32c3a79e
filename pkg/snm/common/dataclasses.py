import dataclasses

from collections.abc import Iterable
from pathlib import Path

import numpy as np

from snm.common.exception import errors


@dataclasses.dataclass(frozen=True, eq=False)
class SampleData:
    """Finite vector of non-negative observations"""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size < 1:
            raise errors.ConfigError(msg='Sample must contain at least one value')
        if not np.all(np.isfinite(values)):
            raise errors.DomainError(msg='Sample values must be finite')
        if np.any(values < 0):
            raise errors.DomainError(msg='Sample values must be non-negative', data={'min': float(values.min())})
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> 'SampleData':
        return cls(np.fromiter((float(v) for v in values), dtype=float))

    @classmethod
    def from_text(cls, text: str) -> 'SampleData':
        """
        Parse an inline list such as ``1.5,2,0``

        :param text: Comma or whitespace separated values
        :return:
        """
        tokens = [token for token in text.replace(',', ' ').split() if token]
        try:
            return cls.from_values(float(token) for token in tokens)
        except ValueError as e:
            raise errors.ConfigError(msg=f'Invalid sample list: {text!r}') from e

    @classmethod
    def from_csv(cls, path: str | Path) -> 'SampleData':
        """
        Read one value per line

        :param path: CSV file path
        :return:
        """
        try:
            values = np.loadtxt(path, dtype=float, delimiter=',', ndmin=1, comments='#')
        except (OSError, ValueError) as e:
            raise errors.ConfigError(msg=f'Cannot read sample file {path}: {e}') from e
        return cls(values)

    def __len__(self) -> int:
        return self.n
