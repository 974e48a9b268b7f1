"""
Montagem da métrica de dimensão 2N = 2 + 2n:

    ds² = e^{2Φ} g_{αβ} dx^α dx^β + Σ_i ε_i g_{αβ} dy_i^α dy_i^β,

com e^{2Φ} = e^{2 e0 φ} w1^{-2(m1+n1)} w2^{-2(m2+n2)} ρ^{n1+n2},
m2 = -m1 e n1 + n2 = (n - 1)/2. Para n = 1 é a métrica de quatro dimensões.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import jets
from .curvature import MetricJet, ricci
from .exceptions import ConfigurationError, DomainError, LOG_DOMAIN, SingularMetric
from .geometry2d import GraphGeometry, _result, laplace_beltrami

logger = logging.getLogger(__name__)

# autovalores com |λ| abaixo disto (relativo a max|λ|) contam como zero
EIGEN_THRESHOLD = 1e-10

__all__ = [
    'AssemblyConfig', 'MetricJet', 'AssembledMetricField', 'conformal_factor', 'conformal_factor_jet',
    'assemble', 'signature', 'assembled_checks', 'parse_eps_blocks',
]


def parse_eps_blocks(value, n=None):
    """
    '1,-1,1' (ou lista) -> (1, -1, 1); cada sinal precisa ser ±1.
    """
    if isinstance(value, str):
        items = [item.strip() for item in value.split(',') if item.strip()]
    else:
        items = list(value)
    try:
        signs = tuple(int(float(item)) for item in items)
    except (TypeError, ValueError):
        raise ConfigurationError(f"eps_blocks inválido: {value!r} (use uma lista como 1,-1).")
    if any(sign not in (1, -1) for sign in signs):
        raise ConfigurationError(f"eps_blocks só aceita +1 e -1, recebeu {value!r}.")
    if n is not None and len(signs) != n:
        raise ConfigurationError(f"eps_blocks precisa de {n} sinais, recebeu {len(signs)}.")
    return signs


@dataclass(frozen=True)
class AssemblyConfig:
    """
    n blocos y, sinais ε_i e expoentes livres e0, m1, n1.

    m2 e n2 não são parâmetros: m2 = -m1 e n2 = (n - 1)/2 - n1.
    O coeficiente de μ no fator conforme já está absorvido em m1.
    """
    n: int = 1
    eps_blocks: tuple = (1,)
    e0: float = 0.0
    m1: float = 0.0
    n1: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool) or self.n < 1:
            raise ConfigurationError(f"n precisa ser um inteiro positivo, recebeu {self.n!r}.")
        object.__setattr__(self, 'eps_blocks', parse_eps_blocks(self.eps_blocks, self.n))
        for name in ('e0', 'm1', 'n1'):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ConfigurationError(f"{name} precisa ser finito.")
            object.__setattr__(self, name, value)
        if not np.isclose(self.dim, 4 + 4 * (self.n1 + self.n2)):
            raise ConfigurationError("Dimensão incompatível com n1 + n2 = (n - 1)/2.")

    @classmethod
    def default(cls, n=1):
        return cls(n=n, eps_blocks=(1,) * n)

    @property
    def m2(self):
        return -self.m1

    @property
    def n2(self):
        return (self.n - 1) / 2 - self.n1

    @property
    def dim(self):
        return 2 + 2 * self.n

    @property
    def exponents(self):
        """
        (expoente de w1, expoente de w2, expoente de ρ) em e^{2Φ}.
        """
        return (
            -2.0 * (self.m1 + self.n1),
            -2.0 * (self.m2 + self.n2),
            self.n1 + self.n2,
        )

    def as_dict(self):
        return {
            'n': self.n,
            'eps_blocks': list(self.eps_blocks),
            'e0': self.e0,
            'm1': self.m1,
            'm2': self.m2,
            'n1': self.n1,
            'n2': self.n2,
            'dim': self.dim,
        }

    def describe(self):
        return (
            f"n={self.n} eps={','.join(str(s) for s in self.eps_blocks)} e0={self.e0:g} "
            f"m1={self.m1:g} n1={Fraction(self.n1).limit_denominator(64)}"
        )


def _check_base(base, exponent, label):
    if float(exponent).is_integer():
        return
    if np.any(~(np.asarray(base) > 0)):
        raise DomainError(
            f"{label} <= 0 com expoente não inteiro {exponent:g}.", reason=LOG_DOMAIN,
        )


def conformal_factor(sample, cfg, phi_value):
    """
    e^{2Φ} a partir dos valores de uma TwoMetricSample.
    """
    pw1, pw2, prho = cfg.exponents
    _check_base(sample.w1, pw1, 'w1')
    _check_base(sample.w2, pw2, 'w2')
    _check_base(sample.rho, prho, 'rho')
    return (
        np.exp(2.0 * cfg.e0 * np.asarray(phi_value, dtype=float))
        * np.power(sample.w1, pw1)
        * np.power(sample.w2, pw2)
        * np.power(sample.rho, prho)
    )


def conformal_factor_jet(geo, cfg):
    """
    e^{2Φ} como jato (exato até a ordem 2) sobre uma GraphGeometry.
    """
    pw1, pw2, prho = cfg.exponents
    _check_base(geo.w[0].value, pw1, 'w1')
    _check_base(geo.w[1].value, pw2, 'w2')
    factor = jets.power(geo.w[0], pw1) * jets.power(geo.w[1], pw2) * jets.power(geo.rho, prho)
    if cfg.e0:
        factor = factor * jets.exp(2.0 * cfg.e0 * geo.phi)
    return factor


def _block_matrix(geo, cfg, factor):
    dim = cfg.dim
    zero = jets.Jet3.constant(np.zeros(geo.shape))
    matrix = [[zero for _ in range(dim)] for _ in range(dim)]
    for a in range(2):
        for b in range(2):
            matrix[a][b] = factor * geo.g[a][b]
            for i, sign in enumerate(cfg.eps_blocks):
                offset = 2 + 2 * i
                matrix[offset + a][offset + b] = float(sign) * geo.g[a][b]
    return matrix


def assemble(spec, cfg, p):
    """
    MetricJet da métrica montada em p (ponto ou lote de pontos).

    As derivadas em relação às coordenadas y são nulas; só x¹, x² são ativas.
    """
    geo = GraphGeometry(spec, p)
    return _assemble_from(geo, cfg)


def _assemble_from(geo, cfg):
    factor = conformal_factor_jet(geo, cfg)
    return MetricJet.from_jets(_block_matrix(geo, cfg, factor))


class AssembledMetricField:
    """
    Campo p -> métrica montada, no formato esperado por `ricci_fd` e
    `bianchi_residual_fd`.
    """

    def __init__(self, spec, cfg):
        self.spec = spec
        self.cfg = cfg

    def metric_jet(self, points):
        return assemble(self.spec, self.cfg, points)

    def components(self, points):
        return self.metric_jet(points).components

    __call__ = components


def signature(spec, cfg, p):
    """
    (positivos - negativos) entre os autovalores da métrica montada em p.
    """
    return signature_of(assemble(spec, cfg, p).components)


def signature_of(components):
    eigenvalues = np.linalg.eigvalsh(components)
    scale = np.max(np.abs(eigenvalues), axis=-1, keepdims=True)
    if np.any(np.abs(eigenvalues) <= EIGEN_THRESHOLD * scale):
        raise SingularMetric("Autovalor nulo: assinatura indefinida.")
    result = np.sum(eigenvalues > 0, axis=-1) - np.sum(eigenvalues < 0, axis=-1)
    return result.astype(int) if np.ndim(result) else int(result)


def phi_jet(geo, cfg):
    """
    Φ como jato: metade do log de |e^{2Φ}|.
    """
    factor = conformal_factor_jet(geo, cfg)
    sign = np.sign(factor.value)
    return 0.5 * jets.log(factor * sign)


def assembled_checks(geo, cfg, metric=None):
    """
    Verificações da métrica montada: equação reduzida de Φ e determinante.

    PHI-EQ: ∇²_g Φ - ((n - 1)/8) g^{αβ} tr[(∂_α g⁻¹) ∂_β g]
    DET-M:  |det M| - e^{4Φ} |det g0|^{1 + n}
    """
    if metric is None:
        metric = _assemble_from(geo, cfg)
    lap_phi = laplace_beltrami(geo.g, phi_jet(geo, cfg))
    source = (cfg.n - 1) / 8.0 * geo.trace_term()
    factor = conformal_factor_jet(geo, cfg).value
    det_m = np.abs(np.linalg.det(metric.components))
    expected = factor ** 2 * abs(geo.det_g0) ** (1 + cfg.n)
    return {
        'PHI-EQ': _result('PHI-EQ', lap_phi - source, 0, [(lap_phi, 0), (source, 0)]),
        'DET-M': _result('DET-M', det_m - expected, 0, [(det_m, 0), (expected, 0)]),
    }


def assembled_ricci(geo, cfg):
    """
    Métrica montada e o relatório de curvatura dela, a partir de uma GraphGeometry.
    """
    metric = _assemble_from(geo, cfg)
    return metric, ricci(metric)
