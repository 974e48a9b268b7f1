"""
Newton amortecido por diferenças finitas para a equação mínima

    [k2 + eps φ_y²] φ_xx - 2 [k0 + eps φ_x φ_y] φ_xy + [k1 + eps φ_x²] φ_yy = 0

num retângulo com dados de Dirichlet, mais a ponte das soluções em grade
para jatos (`grid_jets`) e o formato texto `minsurf v1`.
"""
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from . import jets
from .exceptions import (
    ConfigurationError, NoConvergence, RHO_NONPOSITIVE, SingularJacobian, TooCloseToBoundary,
)
from .surfaces import AmbientMetric, Domain, SurfaceSpec

logger = logging.getLogger(__name__)

FORMAT_TAG = 'minsurf v1'
ARMIJO_C = 1e-4
MAX_HALVINGS = 20

# vizinhos do estêncil de 9 pontos
_STENCIL = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)]


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    x_range: tuple = (-1.0, 1.0)
    y_range: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ConfigurationError(f"A grade precisa de pelo menos 3×3 nós, recebeu {self.nx}×{self.ny}.")
        if not (self.x_range[1] > self.x_range[0] and self.y_range[1] > self.y_range[0]):
            raise ConfigurationError("Intervalos da grade precisam ser crescentes.")
        object.__setattr__(self, 'x_range', tuple(float(v) for v in self.x_range))
        object.__setattr__(self, 'y_range', tuple(float(v) for v in self.y_range))

    @property
    def hx(self):
        return (self.x_range[1] - self.x_range[0]) / (self.nx - 1)

    @property
    def hy(self):
        return (self.y_range[1] - self.y_range[0]) / (self.ny - 1)

    @property
    def x(self):
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    @property
    def y(self):
        return np.linspace(self.y_range[0], self.y_range[1], self.ny)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing='ij')

    def boundary_mask(self):
        return grid_boundary((self.nx, self.ny))

    def nearest(self, points):
        """
        Índices (i, j) do nó mais próximo de cada ponto.
        """
        points = np.asarray(points, dtype=float)
        i = np.rint((points[..., 0] - self.x_range[0]) / self.hx).astype(int)
        j = np.rint((points[..., 1] - self.y_range[0]) / self.hy).astype(int)
        return i, j

    def node(self, i, j):
        return np.stack([self.x_range[0] + i * self.hx, self.y_range[0] + j * self.hy], axis=-1)

    @property
    def domain(self):
        return Domain(self.x_range[0], self.x_range[1], self.y_range[0], self.y_range[1])


@dataclass(frozen=True)
class GridSolution:
    grid: Grid
    values: np.ndarray
    ambient: AmbientMetric
    residual_history: tuple = field(default_factory=tuple)
    converged: bool = False

    @property
    def final_residual(self):
        return self.residual_history[-1] if self.residual_history else None

    def max_residual(self):
        return float(np.max(np.abs(minimal_residual_grid(self.values, self.grid, self.ambient)), initial=0.0))


# discretização

def _differences(u, grid):
    hx, hy = grid.hx, grid.hy
    c = u[1:-1, 1:-1]
    fx = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2.0 * hx)
    fy = (u[1:-1, 2:] - u[1:-1, :-2]) / (2.0 * hy)
    fxx = (u[2:, 1:-1] - 2.0 * c + u[:-2, 1:-1]) / hx ** 2
    fyy = (u[1:-1, 2:] - 2.0 * c + u[1:-1, :-2]) / hy ** 2
    fxy = (u[2:, 2:] - u[2:, :-2] - u[:-2, 2:] + u[:-2, :-2]) / (4.0 * hx * hy)
    return fx, fy, fxx, fxy, fyy


def minimal_residual_grid(u, grid, ambient):
    """
    Resíduo discreto da equação mínima nos nós interiores, forma (nx-2, ny-2).
    """
    k1, k2, k0, eps = ambient.k1, ambient.k2, ambient.k0, ambient.eps
    fx, fy, fxx, fxy, fyy = _differences(u, grid)
    return (k2 + eps * fy * fy) * fxx - 2.0 * (k0 + eps * fx * fy) * fxy + (k1 + eps * fx * fx) * fyy


def _discrete_rho(u, grid, ambient):
    fx, fy, *_ = _differences(u, grid)
    grad = np.stack([fx, fy])
    up = np.einsum('ab,b...->a...', ambient.g0_inv, grad)
    return 1.0 + ambient.eps * np.einsum('a...,a...->...', grad, up)


def _jacobian(u, grid, ambient, index):
    """
    Jacobiano analítico da forma quase-linear, restrito às incógnitas interiores.
    """
    k1, k2, k0, eps = ambient.k1, ambient.k2, ambient.k0, ambient.eps
    hx, hy = grid.hx, grid.hy
    fx, fy, fxx, fxy, fyy = _differences(u, grid)
    a = k2 + eps * fy * fy
    b = k0 + eps * fx * fy
    c = k1 + eps * fx * fx
    # derivadas do resíduo em relação a φ_x e φ_y
    px = -2.0 * eps * fy * fxy + 2.0 * eps * fx * fyy
    py = 2.0 * eps * fy * fxx - 2.0 * eps * fx * fxy

    weights = {
        (0, 0): -2.0 * a / hx ** 2 - 2.0 * c / hy ** 2,
        (1, 0): a / hx ** 2 + px / (2.0 * hx),
        (-1, 0): a / hx ** 2 - px / (2.0 * hx),
        (0, 1): c / hy ** 2 + py / (2.0 * hy),
        (0, -1): c / hy ** 2 - py / (2.0 * hy),
        (1, 1): -b / (2.0 * hx * hy),
        (-1, -1): -b / (2.0 * hx * hy),
        (1, -1): b / (2.0 * hx * hy),
        (-1, 1): b / (2.0 * hx * hy),
    }
    nx, ny = grid.nx, grid.ny
    rows_all, cols_all, data_all = [], [], []
    rows = index[1:-1, 1:-1]
    for di, dj in _STENCIL:
        cols = index[1 + di:nx - 1 + di, 1 + dj:ny - 1 + dj]
        keep = cols >= 0
        rows_all.append(rows[keep])
        cols_all.append(cols[keep])
        data_all.append(np.broadcast_to(weights[(di, dj)], rows.shape)[keep])
    size = (nx - 2) * (ny - 2)
    return sparse.coo_matrix(
        (np.concatenate(data_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(size, size),
    ).tocsc()


def coons_guess(boundary_values):
    """
    Interpolação transfinita bilinear do contorno (exata para dados lineares).
    """
    u = np.array(boundary_values, dtype=float)
    nx, ny = u.shape
    s = np.linspace(0.0, 1.0, nx)[:, None]
    t = np.linspace(0.0, 1.0, ny)[None, :]
    left, right = u[0, :][None, :], u[-1, :][None, :]
    bottom, top = u[:, 0][:, None], u[:, -1][:, None]
    corners = (
        (1 - s) * (1 - t) * u[0, 0] + s * (1 - t) * u[-1, 0]
        + (1 - s) * t * u[0, -1] + s * t * u[-1, -1]
    )
    guess = (1 - s) * left + s * right + (1 - t) * bottom + t * top - corners
    mask = grid_boundary(u.shape)
    guess[mask] = u[mask]
    return guess


def grid_boundary(shape):
    mask = np.zeros(shape, dtype=bool)
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
    return mask


def _boundary_values(boundary, grid):
    X, Y = grid.mesh()
    values = np.zeros((grid.nx, grid.ny))
    mask = grid.boundary_mask()
    values[mask] = np.asarray(boundary(X[mask], Y[mask]), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ConfigurationError("Dado de contorno não finito.")
    return values


def solve_minimal(boundary, ambient, grid, tol=1e-10, max_iter=50):
    """
    Resolve a equação mínima discreta por Newton com busca de Armijo.

    `boundary(x, y)` dá os valores de Dirichlet (vetorizado). O histórico
    guarda ||F||₂ a cada iteração aceita (não crescente pela busca); a
    convergência é decidida pela norma do máximo.
    """
    if not tol > 0:
        raise ConfigurationError(f"tol precisa ser positivo, recebeu {tol}.")
    if not isinstance(grid, Grid):
        grid = Grid(*grid)

    u = coons_guess(_boundary_values(boundary, grid))
    index = -np.ones((grid.nx, grid.ny), dtype=int)
    index[1:-1, 1:-1] = np.arange((grid.nx - 2) * (grid.ny - 2)).reshape(grid.nx - 2, grid.ny - 2)

    residual = minimal_residual_grid(u, grid, ambient)
    history = [float(np.linalg.norm(residual))]
    logger.debug("Newton it=0 |F|=%.3e max=%.3e", history[-1], np.max(np.abs(residual)))

    for iteration in range(1, max_iter + 1):
        if np.max(np.abs(residual)) < tol:
            return GridSolution(grid, u, ambient, tuple(history), True)

        if np.any(~(_discrete_rho(u, grid, ambient) > 0)):
            raise SingularJacobian("rho discreto <= 0: a equação deixa de ser elíptica.", reason=RHO_NONPOSITIVE)
        jacobian = _jacobian(u, grid, ambient, index)
        with warnings.catch_warnings():
            warnings.simplefilter('error', MatrixRankWarning)
            try:
                step = spsolve(jacobian, -residual.ravel())
            except MatrixRankWarning:
                raise SingularJacobian("Jacobiano singular.")
        if not np.all(np.isfinite(step)):
            raise SingularJacobian("Passo de Newton não finito.")

        merit = 0.5 * history[-1] ** 2
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u.copy()
            trial[1:-1, 1:-1] += lam * step.reshape(grid.nx - 2, grid.ny - 2)
            trial_residual = minimal_residual_grid(trial, grid, ambient)
            trial_merit = 0.5 * float(np.sum(trial_residual ** 2))
            if trial_merit <= (1.0 - 2.0 * ARMIJO_C * lam) * merit:
                break
            lam *= 0.5
        else:
            raise NoConvergence(
                f"Busca de linha falhou na iteração {iteration}.",
                history=history,
                solution=GridSolution(grid, u, ambient, tuple(history), False),
            )

        u, residual = trial, trial_residual
        history.append(float(np.linalg.norm(residual)))
        logger.debug("Newton it=%d lambda=%g |F|=%.3e max=%.3e", iteration, lam, history[-1], np.max(np.abs(residual)))

    if np.max(np.abs(residual)) < tol:
        return GridSolution(grid, u, ambient, tuple(history), True)
    raise NoConvergence(
        f"Newton não convergiu em {max_iter} iterações (|F| = {history[-1]:.3e}).",
        history=history,
        solution=GridSolution(grid, u, ambient, tuple(history), False),
    )


# contornos

def linear_boundary(a, b, c):
    return lambda x, y: a * np.asarray(x) + b * np.asarray(y) + c


def boundary_from_surface(spec):
    """
    Contorno tirado da forma fechada de uma superfície do catálogo.
    """
    def boundary(x, y):
        points = np.stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)], axis=-1)
        return spec.phi(points).value
    return boundary


def boundary_from_solution(sol):
    """
    Contorno interpolado (bilinear) de uma solução gravada.

    Pontos fora do retângulo da solução levantam ConfigurationError.
    """
    grid = sol.grid
    interpolator = RegularGridInterpolator((grid.x, grid.y), sol.values)
    slack = 1e-12 * max(grid.x_range[1] - grid.x_range[0], grid.y_range[1] - grid.y_range[0])

    def boundary(x, y):
        points = np.stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)], axis=-1)
        inside = (
            (points[..., 0] >= grid.x_range[0] - slack) & (points[..., 0] <= grid.x_range[1] + slack)
            & (points[..., 1] >= grid.y_range[0] - slack) & (points[..., 1] <= grid.y_range[1] + slack)
        )
        if not np.all(inside):
            raise ConfigurationError(
                f"Contorno pedido fora da grade gravada "
                f"[{grid.x_range[0]:g}, {grid.x_range[1]:g}] × [{grid.y_range[0]:g}, {grid.y_range[1]:g}].",
            )
        points = np.clip(points, grid.domain.lower, grid.domain.upper)
        return interpolator(points)
    return boundary


# jatos a partir da grade

def grid_jets(sol, p):
    """
    Jet3 de φ no nó mais próximo de p por estênceis centrais.

    Derivadas de ordem 1 e 2 com erro O(h²); as de ordem 3 usam estênceis
    centrais de 5 pontos (x³, y³) e 3×3 (mistas). O nó precisa estar a
    pelo menos 2 nós do contorno.
    """
    grid = sol.grid
    u = sol.values
    i, j = grid.nearest(p)
    if np.any((i < 2) | (i > grid.nx - 3) | (j < 2) | (j > grid.ny - 3)):
        raise TooCloseToBoundary("Ponto a menos de 2 nós do contorno da grade.")
    hx, hy = grid.hx, grid.hy

    def at(di, dj):
        return u[i + di, j + dj]

    c = at(0, 0)
    fx = (at(1, 0) - at(-1, 0)) / (2 * hx)
    fy = (at(0, 1) - at(0, -1)) / (2 * hy)
    fxx = (at(1, 0) - 2 * c + at(-1, 0)) / hx ** 2
    fyy = (at(0, 1) - 2 * c + at(0, -1)) / hy ** 2
    fxy = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hx * hy)
    fxxx = (at(2, 0) - 2 * at(1, 0) + 2 * at(-1, 0) - at(-2, 0)) / (2 * hx ** 3)
    fyyy = (at(0, 2) - 2 * at(0, 1) + 2 * at(0, -1) - at(0, -2)) / (2 * hy ** 3)
    fxxy = (
        at(1, 1) - 2 * at(0, 1) + at(-1, 1) - at(1, -1) + 2 * at(0, -1) - at(-1, -1)
    ) / (2 * hy * hx ** 2)
    fxyy = (
        at(1, 1) - 2 * at(1, 0) + at(1, -1) - at(-1, 1) + 2 * at(-1, 0) - at(-1, -1)
    ) / (2 * hx * hy ** 2)
    # mesma ordem de jets.MONOMIALS
    partials = np.stack([c, fx, fy, fxx, fxy, fyy, fxxx, fxxy, fxyy, fyyy])
    return jets.Jet3.from_partials(partials)


def grid_surface(sol, name='grid'):
    """
    SurfaceSpec cujo φ vem da solução em grade; pontos são levados ao nó mais próximo.
    """
    grid = sol.grid

    def admissible(points):
        i, j = grid.nearest(points)
        return (i >= 2) & (i <= grid.nx - 3) & (j >= 2) & (j <= grid.ny - 3)

    def snap(points):
        return grid.node(*grid.nearest(points))

    return SurfaceSpec(
        name=name,
        phi=lambda points: grid_jets(sol, points),
        ambient=sol.ambient,
        domain=grid.domain,
        admissible=admissible,
        description=f'solução em grade {grid.nx}×{grid.ny}',
        parameters={'nx': grid.nx, 'ny': grid.ny},
        snap=snap,
    )


# formato minsurf v1

def write_solution(sol, path):
    grid, ambient = sol.grid, sol.ambient
    header = [
        FORMAT_TAG, grid.nx, grid.ny,
        *(f'{v:.17g}' for v in (*grid.x_range, *grid.y_range, ambient.k1, ambient.k2, ambient.k0)),
        ambient.eps,
    ]
    with open(path, 'w') as handle:
        handle.write(' '.join(str(item) for item in header) + '\n')
        for row in sol.values:
            handle.write(' '.join(f'{v:.17g}' for v in row) + '\n')
        comment = f"# converged={'true' if sol.converged else 'false'}"
        if sol.residual_history:
            comment += f" iterations={len(sol.residual_history) - 1} residual={sol.final_residual:.17g}"
        handle.write(comment + '\n')


def read_solution(path):
    """
    Lê um arquivo `minsurf v1`. Levanta ConfigurationError em cabeçalho ou
    contagem de valores inválidos; erros de E/S propagam como OSError.
    """
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ConfigurationError(f"{path}: arquivo vazio.")
    header = lines[0].split()
    if header[:2] != FORMAT_TAG.split() or len(header) != 12:
        raise ConfigurationError(f"{path}: cabeçalho '{FORMAT_TAG}' inválido.")
    try:
        nx, ny = int(header[2]), int(header[3])
        x0, x1, y0, y1, k1, k2, k0 = (float(v) for v in header[4:11])
        eps = int(header[11])
    except ValueError:
        raise ConfigurationError(f"{path}: valores do cabeçalho inválidos.")

    converged = False
    tokens = []
    for line in lines[1:]:
        stripped = line.strip()
        if stripped.startswith('#'):
            converged = converged or 'converged=true' in stripped
            continue
        tokens.extend(stripped.split())
    if len(tokens) != nx * ny:
        raise ConfigurationError(f"{path}: esperava {nx * ny} valores, encontrou {len(tokens)}.")
    try:
        values = np.array([float(v) for v in tokens]).reshape(nx, ny)
    except ValueError:
        raise ConfigurationError(f"{path}: valor numérico inválido.")
    return GridSolution(
        grid=Grid(nx, ny, (x0, x1), (y0, y1)),
        values=values,
        ambient=AmbientMetric(k1=k1, k2=k2, k0=k0, eps=eps),
        converged=converged,
    )
