"""
Geometria do gráfico x³ = φ(x, y) e da superfície conformemente relacionada.

Todas as grandezas (h, ρ, h⁻¹, g = h/√ρ, r, K, H, λ0, ξ, w, ψ0) são
construídas como jatos a partir do Jet3 de φ, de modo que as identidades
de divergência e os laplacianos saem por propagação de jatos, sem
diferenças finitas. Os pontos podem vir em lote, forma (..., 2).
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .curvature import MetricJet, ricci
from .exceptions import DomainError, LOG_DOMAIN, RHO_NONPOSITIVE, SingularMetric

logger = logging.getLogger(__name__)

# fator que leva o escalar do motor de curvatura ao R das identidades;
# calibrado pela identidade R = -¼ g^{αβ} tr[∂_α g⁻¹ ∂_β g] na superfície de Scherk
CURVATURE_CONVENTION = 1.0

CHECK_NAMES = (
    'P1', 'C1', 'C2a', 'C2b', 'P2a', 'P2b', 'CONF', 'P3a', 'P3b', 'P3c',
    'P4a', 'P4b', 'P4c', 'MU', 'CC1', 'XW', 'P5', 'PHI-H', 'RIC-H', 'DET-H', 'DET-G',
)


# álgebra de matrizes 2×2 de jatos

def _det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _inv2(m):
    inv_det = jets.power(_det2(m), -1)
    return [
        [m[1][1] * inv_det, -(m[0][1] * inv_det)],
        [-(m[1][0] * inv_det), m[0][0] * inv_det],
    ]


def _values(m):
    """
    Matriz de jatos -> array (..., 2, 2) com os valores centrais.
    """
    return np.moveaxis(np.array([[entry.value for entry in row] for row in m]), (0, 1), (-2, -1))


def _scale(*terms):
    """
    max(1, max |termo|) ponto a ponto; termos podem ter eixos de componentes no fim.
    """
    scale = np.ones(())
    for term, ndim in terms:
        term = np.abs(np.asarray(term, dtype=float))
        if ndim:
            term = np.max(term, axis=tuple(range(-ndim, 0)))
        scale = np.maximum(scale, term)
    return scale


def _max_abs(array, ndim):
    array = np.abs(np.asarray(array, dtype=float))
    if ndim:
        array = np.max(array, axis=tuple(range(-ndim, 0)))
    return array


class GraphGeometry:
    """
    Jatos de todas as grandezas do gráfico num lote de pontos.

    `phi` é exato até a ordem 3; gradiente, ρ, h e g até a ordem 2, o que
    basta para a curvatura de g e para laplacianos de funções de ρ e w.
    """

    def __init__(self, spec, points):
        self.spec = spec
        self.points = np.asarray(points, dtype=float)
        ambient = spec.ambient
        self.eps = float(ambient.eps)
        self.g0 = ambient.g0
        self.g0_inv = ambient.g0_inv
        self.det_g0 = ambient.det

        self.phi = spec.jet(self.points)
        self.shape = self.phi.shape
        g0, g0_inv, eps = self.g0, self.g0_inv, self.eps

        self.grad = [self.phi.diff('x'), self.phi.diff('y')]
        self.up = [
            float(g0_inv[a, 0]) * self.grad[0] + float(g0_inv[a, 1]) * self.grad[1]
            for a in range(2)
        ]
        self.rho = 1.0 + eps * (self.grad[0] * self.up[0] + self.grad[1] * self.up[1])
        if np.any(~(self.rho.value > 0)):
            raise DomainError("rho <= 0: raiz de rho indefinida no ramo real.", reason=RHO_NONPOSITIVE)

        self.h = [
            [float(g0[a, b]) + eps * (self.grad[a] * self.grad[b]) for b in range(2)]
            for a in range(2)
        ]
        self.sqrt_rho = jets.sqrt(self.rho)
        inv_sqrt_rho = jets.power(self.rho, -0.5)
        self.h_inv = [
            [float(g0_inv[a, b]) - eps * (self.up[a] * self.up[b]) / self.rho for b in range(2)]
            for a in range(2)
        ]
        self.g = [[self.h[a][b] * inv_sqrt_rho for b in range(2)] for a in range(2)]
        self.g_inv = [[self.h_inv[a][b] * self.sqrt_rho for b in range(2)] for a in range(2)]
        self.w = [self.h[0][0], self.h[1][1]]
        self.xi = [self.g_inv[0][0], self.g_inv[1][1]]
        self.psi0 = -0.25 * jets.log(self.rho)

        # derivadas de φ nos pontos (valores)
        self.dphi = np.stack([self.phi.partial(1, 0), self.phi.partial(0, 1)], axis=-1)
        self.ddphi = np.moveaxis(self.phi.hessian, (0, 1), (-2, -1))

    # valores pontuais

    def phi_mixed(self):
        """
        φ^α_ν = g0^{αβ} φ_{,βν} e φ^{αβ} = g0^{αμ} g0^{βν} φ_{,μν}.
        """
        mixed = np.einsum('ab,...bn->...an', self.g0_inv, self.ddphi)
        raised = np.einsum('...an,nb->...ab', mixed, self.g0_inv)
        return mixed, raised

    def trace_and_square(self):
        mixed, raised = self.phi_mixed()
        trace = np.einsum('...aa->...', mixed)
        square = np.einsum('...ab,...ab->...', raised, self.ddphi)
        return trace, square

    def gaussian_K(self):
        trace, square = self.trace_and_square()
        return self.eps / self.rho.value ** 2 * (trace ** 2 - square)

    def lambda0(self):
        trace, square = self.trace_and_square()
        return 0.5 * (square - trace ** 2)

    def laplacian_phi(self):
        """
        ∇²φ = h^{μν} φ_{,μν}.
        """
        return np.einsum('...ab,...ab->...', _values(self.h_inv), self.ddphi)

    def mean_curvature(self):
        return self.laplacian_phi() / np.sqrt(self.rho.value)

    def ricci_two(self):
        """
        r_{μν} de h pela equação de Gauss do gráfico.
        """
        rho = self.rho.value[..., None, None]
        drho = self.rho.gradient
        drho = np.moveaxis(drho, 0, -1)
        quadratic = np.einsum('...ma,ab,...bn->...mn', self.ddphi, self.g0_inv, self.ddphi)
        return (
            self.eps / rho * self.laplacian_phi()[..., None, None] * self.ddphi
            - self.eps / rho * quadratic
            + np.einsum('...m,...n->...mn', drho, drho) / (4.0 * rho ** 2)
        )

    def sample(self):
        w1, w2 = self.w[0].value, self.w[1].value
        return TwoMetricSample(
            point=self.points,
            h=_values(self.h),
            rho=self.rho.value,
            h_inv=_values(self.h_inv),
            g=_values(self.g),
            g_inv=_values(self.g_inv),
            r=self.ricci_two(),
            K=self.gaussian_K(),
            H=self.mean_curvature(),
            lambda0=self.lambda0(),
            xi1=self.xi[0].value,
            xi2=self.xi[1].value,
            w1=w1,
            w2=w2,
            psi0=self.psi0.value,
            phi=self.phi.value,
        )

    # grandezas de g usadas pelas identidades

    def metric_jet(self, which='g'):
        return MetricJet.from_jets(self.g if which == 'g' else self.h)

    def trace_term(self):
        """
        T = g^{αβ} tr[(∂_α g⁻¹) ∂_β g] = -g^{αβ} tr[g⁻¹ ∂_α g g⁻¹ ∂_β g].
        """
        g_inv = _values(self.g_inv)
        dg = np.stack([
            np.moveaxis(np.array([[entry.partial(*d) for entry in row] for row in self.g]), (0, 1), (-2, -1))
            for d in ((1, 0), (0, 1))
        ], axis=-3)
        # M_α = g⁻¹ ∂_α g
        m = np.einsum('...ij,...ajk->...aik', g_inv, dg)
        return -np.einsum('...ab,...aij,...bji->...', g_inv, m, m)


@dataclass(frozen=True)
class TwoMetricSample:
    point: np.ndarray
    h: np.ndarray
    rho: np.ndarray
    h_inv: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    r: np.ndarray
    K: np.ndarray
    H: np.ndarray
    lambda0: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    psi0: np.ndarray
    phi: np.ndarray = field(default=None)


def sample(spec, p):
    """
    Todas as grandezas do gráfico em p (ponto ou lote de pontos).
    """
    return GraphGeometry(spec, p).sample()


def gaussian_K(spec, p):
    return GraphGeometry(spec, p).gaussian_K()


def ricci_two(spec, p):
    return GraphGeometry(spec, p).ricci_two()


def laplace_beltrami(metric, f):
    """
    ∇²f = |det m|^{-1/2} ∂_α(|det m|^{1/2} m^{αβ} ∂_β f) por propagação de jatos.

    `metric` é uma matriz 2×2 de Jet3 (exatos até a ordem 1) e `f` um Jet3
    exato até a ordem 2, ambos expandidos nos mesmos pontos.
    """
    det = _det2(metric)
    sign = np.sign(det.value)
    if np.any(sign == 0):
        raise SingularMetric("Métrica 2×2 singular no laplaciano.")
    root = jets.sqrt(det * sign)
    inverse = _inv2(metric)
    df = [f.diff('x'), f.diff('y')]
    flux = [root * (inverse[a][0] * df[0] + inverse[a][1] * df[1]) for a in range(2)]
    divergence = flux[0].diff('x').value + flux[1].diff('y').value
    return divergence / root.value


def _divergence_terms(vector):
    """
    (∂_x V^x, ∂_y V^y) para um vetor de jatos; o resíduo é a soma.
    """
    return vector[0].diff('x').value, vector[1].diff('y').value


@dataclass(frozen=True)
class CheckConstants:
    a0: float = 1.0
    a1: float = 1.0
    a2: float = 1.0
    b1: float = 1.0
    b2: float = -1.0

    def __post_init__(self):
        for name in ('a0', 'a1', 'a2', 'b1', 'b2'):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"Constante {name} precisa ser finita.")

    @property
    def c_psi1(self):
        return self.a1 + self.a2

    @property
    def c_mu(self):
        return -self.a0 * (self.b1 + self.b2)


@dataclass(frozen=True)
class CheckResult:
    """
    Resíduo de uma identidade por ponto: bruto, escala de normalização e
    máscara dos pontos onde a verificação não se aplica.
    """
    name: str
    raw: np.ndarray
    scale: np.ndarray
    skipped: np.ndarray
    reason: str = None

    @property
    def normalized(self):
        with np.errstate(invalid='ignore', divide='ignore'):
            value = np.abs(self.raw) / self.scale
        return np.where(self.skipped, np.nan, value)


def _result(name, raw, ndim, terms, skipped=None, reason=None):
    raw = _max_abs(raw, ndim)
    scale = np.broadcast_to(_scale(*terms), raw.shape)
    if skipped is None:
        skipped = np.zeros(raw.shape, dtype=bool)
    raw = np.where(skipped, np.nan, raw)
    return CheckResult(name, raw, scale, np.asarray(skipped), reason if np.any(skipped) else None)


def _guarded_log(jet, ok):
    """
    log do jato nos pontos `ok`; nos demais usa 1 (resultado descartado).
    """
    mask = np.broadcast_to(ok, jet.shape)
    t = np.where(mask, jet.t, 0.0)
    t[0] = np.where(mask, jet.t[0], 1.0)
    return jets.log(jets.Jet3(t, jet.order))


def check_identities(spec, p, consts=None):
    """
    Resíduos de todas as identidades do gráfico em p, por nome de verificação.

    Devolve {nome: CheckResult}. As verificações com logaritmos de ξ ou w
    são marcadas como puladas (LOG_DOMAIN) nos pontos onde o argumento não
    é positivo, em vez de falharem.
    """
    consts = consts or CheckConstants()
    geo = GraphGeometry(spec, p)
    return identity_checks(geo, consts)


def identity_checks(geo, consts):
    """
    Verificações do gráfico sobre uma GraphGeometry já construída.
    """
    eps, g0 = geo.eps, geo.g0
    results = {}

    h = _values(geo.h)
    g = _values(geo.g)
    g_inv = _values(geo.g_inv)
    rho = geo.rho.value
    sqrt_rho = np.sqrt(rho)
    dd = geo.ddphi
    mixed, raised = geo.phi_mixed()
    trace, square = geo.trace_and_square()
    lam = 0.5 * (square - trace ** 2)
    K = geo.gaussian_K()
    r = geo.ricci_two()
    r_scalar = np.einsum('...ab,...ab->...', _values(geo.h_inv), r)

    # P1: φ_αμ φ_βγ - φ_αβ φ_μγ = -λ0 (g0_αμ g0_βγ - g0_αβ g0_γμ)
    left = np.einsum('...am,...bc->...ambc', dd, dd) - np.einsum('...ab,...mc->...ambc', dd, dd)
    right = -lam[..., None, None, None, None] * (
        np.einsum('am,bc->ambc', g0, g0) - np.einsum('ab,cm->ambc', g0, g0)
    )
    results['P1'] = _result('P1', left - right, 4, [(left, 4), (right, 4)])

    # C1
    first = np.einsum('...am,...an->...mn', mixed, dd)
    second = trace[..., None, None] * dd
    third = lam[..., None, None] * g0
    results['C1'] = _result('C1', first - second - third, 2, [(first, 2), (second, 2), (third, 2)])

    # C2a, C2b
    half_k_h = 0.5 * K[..., None, None] * h
    results['C2a'] = _result('C2a', r - half_k_h, 2, [(r, 2), (half_k_h, 2)])
    term = 0.5 * eps * rho ** 2 * K
    results['C2b'] = _result('C2b', lam + term, 0, [(lam, 0), (term, 0)])

    # P2a: ∂_α[√ρ h^{αβ} ∂_β φ], P2b: ∂_α(√ρ h^{αβ})
    flux = [
        geo.sqrt_rho * (geo.h_inv[a][0] * geo.grad[0] + geo.h_inv[a][1] * geo.grad[1])
        for a in range(2)
    ]
    dx, dy = _divergence_terms(flux)
    results['P2a'] = _result('P2a', dx + dy, 0, [(dx, 0), (dy, 0)])
    parts = [
        _divergence_terms([geo.sqrt_rho * geo.h_inv[0][b], geo.sqrt_rho * geo.h_inv[1][b]])
        for b in range(2)
    ]
    p2b = np.stack([dx_ + dy_ for dx_, dy_ in parts], axis=-1)
    p2b_terms = np.stack([np.maximum(np.abs(dx_), np.abs(dy_)) for dx_, dy_ in parts], axis=-1)
    results['P2b'] = _result('P2b', p2b, 1, [(p2b_terms, 1)])

    # curvatura de g pelo motor genérico
    report = ricci(geo.metric_jet('g'))
    R_ab = CURVATURE_CONVENTION * report.ricci
    R = CURVATURE_CONVENTION * report.scalar
    lap_psi0 = laplace_beltrami(geo.g, geo.psi0)
    T = geo.trace_term()

    conf_term = lap_psi0[..., None, None] * g
    results['CONF'] = _result('CONF', R_ab - r + conf_term, 2, [(R_ab, 2), (r, 2), (conf_term, 2)])
    results['P3a'] = _result('P3a', R + 0.25 * T, 0, [(R, 0), (0.25 * T, 0)])
    p3b_term = 0.5 * (rho - 1.0)[..., None, None] * r
    results['P3b'] = _result('P3b', R_ab + p3b_term, 2, [(R_ab, 2), (p3b_term, 2)])
    # R = √ρ (r - 2∇²_h ψ0) = √ρ r - 2∇²_g ψ0, pois ∇²_g = √ρ ∇²_h em duas dimensões
    p3c_a, p3c_b = sqrt_rho * r_scalar, 2.0 * lap_psi0
    results['P3c'] = _result('P3c', R - p3c_a + p3c_b, 0, [(R, 0), (p3c_a, 0), (p3c_b, 0)])

    # laplacianos de ζ, ψ1, ψ2, μ e σ
    a0, a1, a2, b1, b2 = consts.a0, consts.a1, consts.a2, consts.b1, consts.b2
    zeta = (0.5 * a0) * jets.log(geo.rho)
    lap_zeta = laplace_beltrami(geo.g, zeta)
    t1, t2 = a0 * R, a0 * sqrt_rho * K
    results['P4a'] = _result('P4a', lap_zeta - t1 + t2, 0, [(lap_zeta, 0), (t1, 0), (t2, 0)])

    xi_ok = (geo.xi[0].value > 0) & (geo.xi[1].value > 0)
    w_ok = (geo.w[0].value > 0) & (geo.w[1].value > 0)
    if not np.all(xi_ok & w_ok):
        logger.debug("Logaritmos de ξ/w indefinidos em %d ponto(s)", np.count_nonzero(~(xi_ok & w_ok)))

    psi1 = a1 * _guarded_log(geo.xi[0], xi_ok) + a2 * _guarded_log(geo.xi[1], xi_ok)
    lap_psi1 = laplace_beltrami(geo.g, psi1)
    t1 = consts.c_psi1 * R
    results['P4b'] = _result('P4b', lap_psi1 - t1, 0, [(lap_psi1, 0), (t1, 0)], ~xi_ok, LOG_DOMAIN)

    psi2 = b1 * _guarded_log(geo.w[0], w_ok) + b2 * _guarded_log(geo.w[1], w_ok)
    lap_psi2 = laplace_beltrami(geo.g, psi2)
    t1, t2 = 2.0 * (b1 + b2) * R, (b1 + b2) * sqrt_rho * K
    results['P4c'] = _result('P4c', lap_psi2 - t1 + t2, 0, [(lap_psi2, 0), (t1, 0), (t2, 0)], ~w_ok, LOG_DOMAIN)

    mu = (b1 + b2) * zeta - a0 * psi2
    lap_mu = laplace_beltrami(geo.g, mu)
    t1 = a0 * (b1 + b2) * R
    results['MU'] = _result('MU', lap_mu + t1, 0, [(lap_mu, 0), (t1, 0)], ~w_ok, LOG_DOMAIN)

    # ∇²σ = -(c/4) T para σ = ψ1 e σ = μ
    branch_psi1 = lap_psi1 + 0.25 * consts.c_psi1 * T
    branch_mu = lap_mu + 0.25 * consts.c_mu * T
    scale_psi1 = _scale((lap_psi1, 0), (0.25 * consts.c_psi1 * T, 0))
    scale_mu = _scale((lap_mu, 0), (0.25 * consts.c_mu * T, 0))
    worse_psi1 = np.abs(branch_psi1) / scale_psi1 >= np.abs(branch_mu) / scale_mu
    cc1_ok = xi_ok & w_ok
    results['CC1'] = CheckResult(
        'CC1',
        np.where(cc1_ok, np.where(worse_psi1, np.abs(branch_psi1), np.abs(branch_mu)), np.nan),
        np.where(worse_psi1, scale_psi1, scale_mu),
        ~cc1_ok,
        LOG_DOMAIN if np.any(~cc1_ok) else None,
    )

    # ξ–w
    xi = np.stack([geo.xi[0].value, geo.xi[1].value], axis=-1)
    w_swapped = np.stack([geo.w[1].value, geo.w[0].value], axis=-1) / (geo.det_g0 * sqrt_rho[..., None])
    results['XW'] = _result('XW', xi - w_swapped, 1, [(xi, 1), (w_swapped, 1)])

    # P5: ∂_α[g^{αβ} g⁻¹ ∂_β g]
    p5_terms = [np.zeros(g.shape), np.zeros(g.shape)]
    for i in range(2):
        for k in range(2):
            vector = []
            for a in range(2):
                entry = None
                for b in range(2):
                    db = 'x' if b == 0 else 'y'
                    for j in range(2):
                        piece = geo.g_inv[a][b] * geo.g_inv[i][j] * geo.g[j][k].diff(db)
                        entry = piece if entry is None else entry + piece
                vector.append(entry)
            dx, dy = _divergence_terms(vector)
            p5_terms[0][..., i, k] = dx
            p5_terms[1][..., i, k] = dy
    results['P5'] = _result('P5', p5_terms[0] + p5_terms[1], 2, [(p5_terms[0], 2), (p5_terms[1], 2)])

    lap_phi = laplace_beltrami(geo.g, geo.phi)
    hessian_scale = np.max(np.abs(g_inv), axis=(-2, -1)) * np.max(np.abs(dd), axis=(-2, -1))
    results['PHI-H'] = _result('PHI-H', lap_phi, 0, [(lap_phi, 0), (hessian_scale, 0)])

    ric_h = ricci(geo.metric_jet('h')).ricci
    results['RIC-H'] = _result('RIC-H', ric_h - r, 2, [(ric_h, 2), (r, 2)])

    det_h = np.linalg.det(h)
    expected = geo.det_g0 * rho
    results['DET-H'] = _result('DET-H', det_h - expected, 0, [(det_h, 0), (expected, 0)])
    det_g = np.linalg.det(g)
    results['DET-G'] = _result('DET-G', det_g - geo.det_g0, 0, [(det_g, 0), (geo.det_g0, 0)])
    return results
