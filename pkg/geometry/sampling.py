"""
Amostragem determinística de pontos por sequência de Halton embaralhada.
"""
import logging

import numpy as np
from scipy.stats import qmc

from .exceptions import INADMISSIBLE

logger = logging.getLogger(__name__)


class PointSampler:
    """
    Sorteia pontos no retângulo do domínio a partir de uma sequência de
    Halton com semente; a mesma semente reproduz a mesma sequência.
    """

    def __init__(self, domain, seed):
        self.domain = domain
        self.seed = seed
        self.engine = qmc.Halton(d=2, scramble=True, seed=seed)
        self.drawn = 0

    def draw(self, count):
        if count <= 0:
            return np.zeros((0, 2))
        unit = self.engine.random(count)
        self.drawn += count
        return qmc.scale(unit, self.domain.lower, self.domain.upper)


def admissible_points(spec, count, seed, redraw_factor=10):
    """
    Até `count` pontos admissíveis de `spec` (já levados ao ponto de
    avaliação por `spec.snap`), com no máximo redraw_factor × count sorteios.

    Devolve (pontos, rejeitados), onde rejeitados é uma lista de
    (ponto, motivo) dos sorteios descartados.
    """
    sampler = PointSampler(spec.domain, seed)
    budget = redraw_factor * count
    accepted, rejected = [], []
    while len(accepted) < count and sampler.drawn < budget:
        batch = spec.snap(sampler.draw(min(count - len(accepted), budget - sampler.drawn)))
        mask = spec.is_admissible(batch)
        accepted.extend(batch[mask])
        rejected.extend((point, INADMISSIBLE) for point in batch[~mask])
    if len(accepted) < count:
        logger.warning(
            "%s: apenas %d de %d pontos admissíveis em %d sorteios", spec.name, len(accepted), count, budget,
        )
    return np.array(accepted).reshape(-1, 2), rejected
