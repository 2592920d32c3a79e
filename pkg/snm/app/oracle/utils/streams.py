import dataclasses

import numpy as np


def chunk_sizes(total: int, batch: int) -> list[int]:
    """Split ``total`` draws into batches, the partition depends on ``batch`` only"""
    full, rest = divmod(total, batch)
    return [batch] * full + ([rest] if rest else [])


def chunk_streams(seed: int, chunks: int) -> list[np.random.SeedSequence]:
    """One independent child sequence per chunk, so results do not depend on the worker count"""
    return np.random.SeedSequence(seed).spawn(chunks)


def philox(sequence: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(sequence))


@dataclasses.dataclass(frozen=True)
class RunningMoments:
    """Count, mean and centred power sums of a stream of values, merged with the pairwise update"""

    count: int = 0
    centre: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    @classmethod
    def of(cls, values: np.ndarray) -> 'RunningMoments':
        values = np.asarray(values, dtype=float).reshape(-1)
        if not values.size:
            return cls()
        centre = float(values.mean())
        d = values - centre
        sq = d * d
        return cls(int(values.size), centre, float(sq.sum()), float((sq * d).sum()), float((sq * sq).sum()))

    def merge(self, other: 'RunningMoments') -> 'RunningMoments':
        if not other.count:
            return self
        if not self.count:
            return other
        na, nb = self.count, other.count
        n = na + nb
        delta = other.centre - self.centre
        share = delta / n
        m2 = self.m2 + other.m2 + delta * share * na * nb
        m3 = (
            self.m3
            + other.m3
            + delta * share * share * na * nb * (na - nb)
            + 3.0 * share * (na * other.m2 - nb * self.m2)
        )
        m4 = (
            self.m4
            + other.m4
            + delta * share**3 * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * share * share * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * share * (na * other.m3 - nb * self.m3)
        )
        return RunningMoments(n, self.centre + share * nb, m2, m3, m4)

    @property
    def mean(self) -> float:
        return self.centre if self.count else float('nan')

    @property
    def variance(self) -> float:
        """Unbiased sample variance"""
        if self.count < 2:
            return 0.0
        return max(self.m2, 0.0) / (self.count - 1)

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.variance / self.count)) if self.count else float('nan')

    @property
    def variance_std_error(self) -> float:
        """Standard error of the sample variance, from the fourth central moment"""
        if self.count < 2:
            return 0.0
        n = self.count
        return float(np.sqrt(max(self.m4 / n - self.variance**2, 0.0) / n))


def merge_all(parts: list[RunningMoments]) -> RunningMoments:
    merged = RunningMoments()
    for part in parts:
        merged = merged.merge(part)
    return merged
