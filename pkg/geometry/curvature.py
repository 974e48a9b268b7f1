"""
Motor de curvatura independente da dimensão.

Entrada: um `MetricJet` com as componentes da métrica e suas derivadas
primeiras e segundas nas coordenadas ativas (as primeiras `active`
coordenadas; nas demais direções a métrica é constante). Todos os arrays
são "lote primeiro": forma (..., D, D) para as componentes,
(..., k, D, D) para d1 e (..., k, k, D, D) para d2.

Convenções: Γ^a_{bc} = ½ g^{ad}(∂_b g_{dc} + ∂_c g_{db} - ∂_d g_{bc}),
R^a_{bcd} = ∂_c Γ^a_{db} - ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} - Γ^a_{de} Γ^e_{cb},
R_{bd} = R^a_{bad}. Com isso a esfera de raio a tem escalar 2/a² > 0.
"""
import logging
from dataclasses import dataclass

import numpy as np

from . import jets
from .exceptions import SingularMetric

logger = logging.getLogger(__name__)

# min|λ| / max|λ| abaixo disto conta como métrica singular
SINGULAR_RCOND = 1e-12


@dataclass(frozen=True)
class MetricJet:
    components: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    @property
    def dim(self):
        return self.components.shape[-1]

    @property
    def active(self):
        return self.d1.shape[-3]

    @property
    def batch_shape(self):
        return self.components.shape[:-2]

    @classmethod
    def from_jets(cls, matrix):
        """
        Constrói a partir de uma matriz D×D de Jet3 (ou números) em (x¹, x²).
        Os jatos precisam ser exatos até a ordem 2.
        """
        batch = ()
        for row in matrix:
            for entry in row:
                if isinstance(entry, jets.Jet3):
                    batch = entry.shape
                    if entry.order < 2:
                        raise ValueError("Componentes da métrica precisam de jatos exatos até a ordem 2.")
        entries = [
            [entry if isinstance(entry, jets.Jet3) else jets.Jet3.constant(np.full(batch, float(entry)))
             for entry in row]
            for row in matrix
        ]
        values = np.array([[entry.value for entry in row] for row in entries])
        grads = np.array([[entry.gradient for entry in row] for row in entries])
        hessians = np.array([[entry.hessian for entry in row] for row in entries])
        return cls(
            components=np.moveaxis(values, (0, 1), (-2, -1)),
            d1=np.moveaxis(grads, (0, 1, 2), (-2, -1, -3)),
            d2=np.moveaxis(hessians, (0, 1, 2, 3), (-2, -1, -4, -3)),
        )

    def full_d1(self):
        """
        ∂_c g_{ab} com c percorrendo todas as D coordenadas (zeros fora das ativas).
        """
        shape = self.batch_shape + (self.dim, self.dim, self.dim)
        full = np.zeros(shape)
        full[..., :self.active, :, :] = self.d1
        return full

    def inverse(self):
        return _inverse(self.components)


@dataclass(frozen=True)
class CurvatureReport:
    point: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    max_abs_ricci: np.ndarray
    normalized_ricci: np.ndarray

    def einstein(self, metric):
        return self.ricci - 0.5 * self.scalar[..., None, None] * metric


def _inverse(g):
    if not np.all(np.isfinite(g)):
        raise SingularMetric("Métrica com componentes não finitas.")
    magnitudes = np.abs(np.linalg.eigvalsh(g))
    with np.errstate(divide='ignore', invalid='ignore'):
        rcond = np.min(magnitudes, axis=-1) / np.max(magnitudes, axis=-1)
    if np.any(~(rcond > SINGULAR_RCOND)):
        raise SingularMetric("Métrica não invertível (mal condicionada).")
    return np.linalg.inv(g)


def _christoffel_from(g_inv, dg):
    # dg[..., c, a, b] = ∂_c g_ab em todas as direções
    t = np.einsum('...bdc->...dbc', dg) + np.einsum('...cdb->...dbc', dg) - dg
    return 0.5 * np.einsum('...ad,...dbc->...abc', g_inv, t), t


def _riemann_from(gamma, dgamma):
    # dgamma[..., e, a, b, c] = ∂_e Γ^a_{bc}
    return (
        np.einsum('...cadb->...abcd', dgamma)
        - np.einsum('...dacb->...abcd', dgamma)
        + np.einsum('...ace,...edb->...abcd', gamma, gamma)
        - np.einsum('...ade,...ecb->...abcd', gamma, gamma)
    )


def christoffel(m):
    """
    Símbolos Γ^a_{bc} da conexão de Levi-Civita, forma (..., D, D, D).
    """
    g_inv = m.inverse()
    gamma, _ = _christoffel_from(g_inv, m.full_d1())
    return gamma


def ricci(m, point=None):
    """
    Christoffel, Riemann, Ricci e escalar de um MetricJet.

    O resíduo normalizado é max|R_ab| / (1 + max|∂²g| + max|Γ|²).
    """
    dim, k = m.dim, m.active
    g_inv = m.inverse()
    dg = m.full_d1()
    gamma, t = _christoffel_from(g_inv, dg)

    # ∂_e g^{ad} e ∂_e T_{dbc} apenas nas direções ativas
    dg_inv = -np.einsum('...ap,...epq,...qd->...ead', g_inv, m.d1, g_inv)
    ddg = np.zeros(m.batch_shape + (k, dim, dim, dim))
    ddg[..., :, :k, :, :] = m.d2
    dt = (
        np.einsum('...ebdc->...edbc', ddg)
        + np.einsum('...ecdb->...edbc', ddg)
        - ddg
    )
    dgamma_active = 0.5 * (
        np.einsum('...ead,...dbc->...eabc', dg_inv, t)
        + np.einsum('...ad,...edbc->...eabc', g_inv, dt)
    )
    dgamma = np.zeros(m.batch_shape + (dim, dim, dim, dim))
    dgamma[..., :k, :, :, :] = dgamma_active

    riemann = _riemann_from(gamma, dgamma)
    ricci_tensor = np.einsum('...abad->...bd', riemann)
    scalar = np.einsum('...bd,...bd->...', g_inv, ricci_tensor)

    max_abs = np.max(np.abs(ricci_tensor), axis=(-2, -1))
    scale = 1.0 + np.max(np.abs(m.d2), axis=(-4, -3, -2, -1)) + np.max(np.abs(gamma), axis=(-3, -2, -1)) ** 2
    return CurvatureReport(
        point=None if point is None else np.asarray(point, dtype=float),
        christoffel=gamma,
        riemann=riemann,
        ricci=ricci_tensor,
        scalar=scalar,
        max_abs_ricci=max_abs,
        normalized_ricci=max_abs / scale,
    )


# oráculo por diferenças finitas

def _offsets(points, step, axis):
    shift = np.zeros(2)
    shift[axis] = step
    return points + shift, points - shift


def _christoffel_fd(metric_field, points, step):
    g = metric_field(points)
    dim = g.shape[-1]
    dg = np.zeros(g.shape[:-2] + (dim, dim, dim))
    for axis in range(2):
        forward, backward = _offsets(points, step, axis)
        dg[..., axis, :, :] = (metric_field(forward) - metric_field(backward)) / (2.0 * step)
    gamma, _ = _christoffel_from(_inverse(g), dg)
    return gamma


def ricci_fd(metric_field, p, step=1e-3):
    """
    Ricci por diferenças centrais de segunda ordem.

    `metric_field` leva pontos (..., 2) às componentes (..., D, D); a
    métrica só pode depender das duas primeiras coordenadas. Γ vem de
    diferenças da métrica e ∂Γ de diferenças de Γ.
    """
    points = np.asarray(p, dtype=float)
    gamma = _christoffel_fd(metric_field, points, step)
    dim = gamma.shape[-1]
    dgamma = np.zeros(gamma.shape[:-3] + (dim, dim, dim, dim))
    for axis in range(2):
        forward, backward = _offsets(points, step, axis)
        dgamma[..., axis, :, :, :] = (
            _christoffel_fd(metric_field, forward, step) - _christoffel_fd(metric_field, backward, step)
        ) / (2.0 * step)
    riemann = _riemann_from(gamma, dgamma)
    return np.einsum('...abad->...bd', riemann)


def bianchi_residual_fd(metric_jet_field, p, step=1e-3):
    """
    max |∇^a G_{ab}| com a derivada de G por diferenças centrais (diagnóstico).
    """
    points = np.asarray(p, dtype=float)

    def einstein_at(q):
        m = metric_jet_field(q)
        return ricci(m).einstein(m.components)

    m = metric_jet_field(points)
    report = ricci(m)
    g_inv = m.inverse()
    einstein = report.einstein(m.components)
    dim = m.dim
    d_einstein = np.zeros(einstein.shape[:-2] + (dim, dim, dim))
    for axis in range(2):
        forward, backward = _offsets(points, step, axis)
        d_einstein[..., axis, :, :] = (einstein_at(forward) - einstein_at(backward)) / (2.0 * step)
    gamma = report.christoffel
    covariant = (
        d_einstein
        - np.einsum('...eca,...eb->...cab', gamma, einstein)
        - np.einsum('...ecb,...ae->...cab', gamma, einstein)
    )
    divergence = np.einsum('...ca,...cab->...b', g_inv, covariant)
    return np.max(np.abs(divergence), axis=-1)


# métricas de teste

class JetMetricField:
    """
    Campo de métrica dado por uma função (x, y) -> matriz de Jet3.
    """

    def __init__(self, name, build):
        self.name = name
        self.build = build

    def metric_jet(self, points):
        points = np.asarray(points, dtype=float)
        x = jets.jet_var('x', points[..., 0])
        y = jets.jet_var('y', points[..., 1])
        return MetricJet.from_jets(self.build(x, y))

    def components(self, points):
        return self.metric_jet(points).components


def flat_metric(signs=(1, 1, 1, 1)):
    signs = [float(s) for s in signs]
    dim = len(signs)
    return JetMetricField(
        'flat',
        lambda x, y: [[signs[a] if a == b else 0.0 for b in range(dim)] for a in range(dim)],
    )


def polar_metric():
    """
    diag(1, x²): o plano em coordenadas polares, com x no papel do raio.
    """
    return JetMetricField('polar', lambda x, y: [[1.0, 0.0], [0.0, x * x]])


def sphere_metric(a=1.0):
    """
    diag(a², a² sin² x): esfera de raio a, x no papel do ângulo polar.
    """
    a2 = float(a) ** 2
    return JetMetricField(
        f'sphere:{a}',
        lambda x, y: [[a2, 0.0], [0.0, a2 * jets.sin(x) * jets.sin(x)]],
    )
