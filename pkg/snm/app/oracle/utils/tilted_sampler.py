import math

import numpy as np

from snm.app.distributions.model import FamilyModel
from snm.common.log import log
from snm.core.conf import settings

_PILOT_DRAWS = 4096
_MAX_BATCH = 4_000_000


class TiltedSampler:
    """
    Draws from F^(λ) by rejection from the base law, accepting x with probability e^(-λ(x - x_low))

    Switches to inverse-CDF sampling on the tilted law when the pilot acceptance rate falls
    below ``ORACLE_MIN_ACCEPTANCE``.
    """

    def __init__(self, model: FamilyModel, lam: float, rng: np.random.Generator) -> None:
        self.model = model
        self.lam = float(lam)
        self.rng = rng
        self.lower = model.lower
        self.acceptance = 1.0
        self.inverse_cdf = False
        if self.lam > 0:
            pilot = model.sample(_PILOT_DRAWS, rng)
            self.acceptance = float(np.exp(-self.lam * (pilot - self.lower)).mean())
            if self.acceptance < settings.ORACLE_MIN_ACCEPTANCE:
                self.inverse_cdf = True
                log.info(
                    'Acceptance {:.2e} for {} at λ={:g}, sampling by inverse CDF',
                    self.acceptance,
                    model.spec.text(),
                    self.lam,
                )

    def draw(self, size: int | tuple[int, ...]) -> np.ndarray:
        shape = (size,) if isinstance(size, int) else tuple(size)
        total = math.prod(shape)
        if self.lam == 0:
            return self.model.sample(shape, self.rng)
        if self.inverse_cdf:
            law = self.model.tilted_law(self.lam)
            return np.asarray(law.ppf(self.rng.random(total)), dtype=float).reshape(shape)
        kept: list[np.ndarray] = []
        have = 0
        while have < total:
            batch = min(int((total - have) / max(self.acceptance, 1e-12) * 1.1) + 16, _MAX_BATCH)
            x = self.model.sample(batch, self.rng)
            accepted = x[self.rng.random(batch) < np.exp(-self.lam * (x - self.lower))]
            kept.append(accepted)
            have += accepted.size
        return np.concatenate(kept)[:total].reshape(shape)
