"""
Catálogo de gráficos mínimos exatos x³ = φ(x, y) em espaços planos de
dimensão 3, com o resíduo pontual da equação mínima e a curvatura média.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .exceptions import ConfigurationError, DomainError, InadmissiblePoint, RHO_NONPOSITIVE

logger = logging.getLogger(__name__)

# distância mantida dos lugares singulares (cos x = 0, eixo x = 0, r = 1, u = 0)
MARGIN = 0.1


@dataclass(frozen=True)
class AmbientMetric:
    """
    Métrica plana ds² = g0_{μν} dx^μ dx^ν + eps (dx³)², com g0 = [[k1, k0], [k0, k2]].
    """
    k1: float = 1.0
    k2: float = 1.0
    k0: float = 0.0
    eps: int = 1

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ConfigurationError(f"eps deve ser +1 ou -1, recebeu {self.eps}.")
        if self.det == 0:
            raise ConfigurationError("det(g0) = k1 k2 - k0² não pode ser zero.")

    @property
    def det(self):
        return self.k1 * self.k2 - self.k0 ** 2

    @property
    def g0(self):
        return np.array([[self.k1, self.k0], [self.k0, self.k2]], dtype=float)

    @property
    def g0_inv(self):
        return np.array([[self.k2, -self.k0], [-self.k0, self.k1]], dtype=float) / self.det

    @property
    def signature(self):
        eigenvalues = np.linalg.eigvalsh(self.g0)
        return int(np.sum(eigenvalues > 0) - np.sum(eigenvalues < 0))

    def as_dict(self):
        return {'k1': self.k1, 'k2': self.k2, 'k0': self.k0, 'eps': self.eps}


EUCLIDEAN = AmbientMetric()
LORENTZIAN = AmbientMetric(k1=1.0, k2=-1.0, k0=0.0, eps=1)


@dataclass(frozen=True)
class Domain:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        x, y = points[..., 0], points[..., 1]
        return (x > self.x_min) & (x < self.x_max) & (y > self.y_min) & (y < self.y_max)

    @property
    def lower(self):
        return np.array([self.x_min, self.y_min])

    @property
    def upper(self):
        return np.array([self.x_max, self.y_max])

    def as_list(self):
        return [self.x_min, self.x_max, self.y_min, self.y_max]


def _everywhere(points):
    return np.ones(np.shape(points)[:-1], dtype=bool)


def _identity(points):
    return points


@dataclass(frozen=True)
class SurfaceSpec:
    """
    Um gráfico φ com os dados do espaço ambiente e o domínio admissível.

    `phi` recebe um array de pontos (..., 2) e devolve o Jet3 de φ nesses
    pontos. `snap` leva um ponto amostrado ao ponto onde φ é de fato
    avaliado (a identidade para superfícies analíticas, o nó mais próximo
    para soluções em grade).
    """
    name: str
    phi: Callable
    ambient: AmbientMetric
    domain: Domain
    admissible: Callable = _everywhere
    non_minimal: bool = False
    description: str = ''
    parameters: dict = field(default_factory=dict, compare=False)
    snap: Callable = _identity

    def is_admissible(self, points):
        points = np.asarray(points, dtype=float)
        return self.domain.contains(points) & self.admissible(points)

    def jet(self, points):
        points = np.asarray(points, dtype=float)
        inside = self.is_admissible(points)
        if not np.all(inside):
            bad = np.asarray(points)[~inside] if points.ndim > 1 else points
            raise InadmissiblePoint(f"Ponto(s) fora do domínio admissível de '{self.name}': {bad.tolist()}")
        return self.phi(points)


def _seeded(function):
    """
    Avaliador a partir de uma expressão f(x, y) em jatos.
    """
    def evaluator(points):
        x = jets.jet_var('x', points[..., 0])
        y = jets.jet_var('y', points[..., 1])
        return function(x, y)
    return evaluator


def plane(a=0.5, b=-0.25, c=0.0):
    a, b, c = float(a), float(b), float(c)
    return SurfaceSpec(
        name='plane',
        phi=_seeded(lambda x, y: a * x + b * y + c),
        ambient=EUCLIDEAN,
        domain=Domain(-1.0, 1.0, -1.0, 1.0),
        description='φ = a x + b y + c',
        parameters={'a': a, 'b': b, 'c': c},
    )


def scherk():
    half = np.pi / 2 - MARGIN
    return SurfaceSpec(
        name='scherk',
        phi=_seeded(lambda x, y: jets.log(jets.cos(y)) - jets.log(jets.cos(x))),
        ambient=EUCLIDEAN,
        domain=Domain(-half, half, -half, half),
        description='φ = log(cos y) - log(cos x)',
    )


def helicoid(c=1.0):
    c = float(c)
    return SurfaceSpec(
        name='helicoid',
        phi=_seeded(lambda x, y: c * jets.atan2(y, x)),
        ambient=EUCLIDEAN,
        domain=Domain(MARGIN, 2.0, -2.0, 2.0),
        admissible=lambda points: points[..., 0] > MARGIN,
        description='φ = c arctan(y/x), x > margem',
        parameters={'c': c},
    )


def catenoid():
    return SurfaceSpec(
        name='catenoid',
        phi=_seeded(lambda x, y: jets.arccosh(jets.sqrt(x * x + y * y))),
        ambient=EUCLIDEAN,
        domain=Domain(-2.5, 2.5, -2.5, 2.5),
        admissible=lambda points: np.hypot(points[..., 0], points[..., 1]) > 1.0 + MARGIN,
        description='φ = arccosh(sqrt(x² + y²)), r > 1 + margem',
    )


PROFILES = ('sinh', 'linear')


def _profile(profile, slope):
    if profile == 'sinh':
        return lambda u: slope * jets.sinh(u)
    if profile == 'linear':
        return lambda u: slope * u
    raise ConfigurationError(f"Perfil desconhecido: {profile!r} (use {', '.join(PROFILES)}).")


DEFAULT_SLOPES = {'sinh': 1.0, 'linear': 2.0}


def born_infeld(sign=1, profile='sinh', slope=None):
    """
    Onda de Born–Infeld φ = F(x ± y) no ambiente g0 = diag(1, -1), eps = +1.

    Para F = sinh o peso w2 = F'² - 1 se anula em u = 0; esses pontos
    ficam fora do domínio admissível. O perfil linear com |slope| = 1 é a
    onda nula (w2 ≡ 0) e não é aceito.
    """
    slope = DEFAULT_SLOPES.get(profile, 1.0) if slope is None else float(slope)
    F = _profile(profile, slope)
    if profile == 'sinh':
        admissible = lambda points: np.abs(points[..., 0] + sign * points[..., 1]) > MARGIN
    elif abs(slope) == 1.0:
        raise ConfigurationError("Perfil linear com |slope| = 1 é nulo (w2 ≡ 0); use outra inclinação.")
    else:
        admissible = _everywhere
    return SurfaceSpec(
        name='born_infeld_plus' if sign > 0 else 'born_infeld_minus',
        phi=_seeded(lambda x, y: F(x + sign * y)),
        ambient=LORENTZIAN,
        domain=Domain(-1.0, 1.0, -1.0, 1.0),
        admissible=admissible,
        description=f"φ = F(x {'+' if sign > 0 else '-'} y), F = {profile}",
        parameters={'profile': profile, 'slope': slope},
    )


def nonminimal_x2():
    return SurfaceSpec(
        name='nonminimal_x2',
        phi=_seeded(lambda x, y: x * x),
        ambient=EUCLIDEAN,
        domain=Domain(-1.0, 1.0, -1.0, 1.0),
        non_minimal=True,
        description='φ = x² (controle negativo, não mínima)',
    )


BUILDERS = {
    'plane': plane,
    'scherk': scherk,
    'helicoid': helicoid,
    'catenoid': catenoid,
    'born_infeld_plus': lambda **params: born_infeld(1, **params),
    'born_infeld_minus': lambda **params: born_infeld(-1, **params),
    'nonminimal_x2': nonminimal_x2,
}

MINIMAL_NAMES = ('plane', 'scherk', 'helicoid', 'catenoid', 'born_infeld_plus', 'born_infeld_minus')


def catalog():
    """
    Todas as superfícies do catálogo com os parâmetros padrão.
    """
    return [builder() for builder in BUILDERS.values()]


def get_surface(name, params=None):
    """
    Constrói a superfície `name` com os parâmetros `params` (strings ou números).
    """
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise ConfigurationError(f"Superfície desconhecida: {name!r}. Opções: {', '.join(BUILDERS)}.")
    params = dict(params or {})
    try:
        return builder(**params)
    except TypeError as e:
        raise ConfigurationError(f"Parâmetros inválidos para '{name}': {params} ({e})")
    except ValueError as e:
        raise ConfigurationError(f"Parâmetros inválidos para '{name}': {e}")


def graph_derivatives(spec, points):
    """
    (φ_x, φ_y, φ_xx, φ_xy, φ_yy) nos pontos dados.
    """
    phi = spec.jet(points)
    return (
        phi.partial(1, 0), phi.partial(0, 1),
        phi.partial(2, 0), phi.partial(1, 1), phi.partial(0, 2),
    )


def minimal_residual(spec, p):
    """
    Resíduo [k2 + eps φ_y²] φ_xx - 2 [k0 + eps φ_x φ_y] φ_xy + [k1 + eps φ_x²] φ_yy.
    """
    k1, k2, k0, eps = spec.ambient.k1, spec.ambient.k2, spec.ambient.k0, spec.ambient.eps
    fx, fy, fxx, fxy, fyy = graph_derivatives(spec, p)
    return (k2 + eps * fy * fy) * fxx - 2.0 * (k0 + eps * fx * fy) * fxy + (k1 + eps * fx * fx) * fyy


def mean_curvature(spec, p):
    """
    H = rho^(-1/2) h^{μν} φ_{,μν}, com h^{μν} = g0^{μν} - (eps/rho) φ^μ φ^ν.
    """
    ambient = spec.ambient
    fx, fy, fxx, fxy, fyy = graph_derivatives(spec, p)
    grad = np.stack([fx, fy])
    up = np.einsum('ab,b...->a...', ambient.g0_inv, grad)
    rho = 1.0 + ambient.eps * np.einsum('a...,a...->...', grad, up)
    if np.any(~(rho > 0)):
        raise DomainError("rho <= 0: raiz de rho indefinida no ramo real.", reason=RHO_NONPOSITIVE)
    h_inv = ambient.g0_inv.reshape((2, 2) + (1,) * np.ndim(rho)) - (ambient.eps / rho) * up[:, None] * up[None, :]
    hessian = np.stack([np.stack([fxx, fxy]), np.stack([fxy, fyy])])
    return np.einsum('ab...,ab...->...', h_inv, hessian) / np.sqrt(rho)
