"""
Peças comuns dos comandos `verify`, `solve` e `curvature`: leitura das
flags em forma de texto, arquivo de configuração e códigos de saída.
"""
import logging

import numpy as np
from decouple import Config, RepositoryEnv
from django.core.management.base import CommandError

from geometry.assembly import AssembledMetricField, AssemblyConfig
from geometry.curvature import flat_metric, polar_metric, sphere_metric
from geometry.exceptions import ConfigurationError
from geometry.solver import Grid, boundary_from_solution, boundary_from_surface, linear_boundary, read_solution
from geometry.surfaces import EUCLIDEAN, AmbientMetric, get_surface

logger = logging.getLogger(__name__)

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

# chaves aceitas em `verify --config`, com o tipo de cada uma
CONFIG_KEYS = {
    'surface': str,
    'grid': str,
    'n': int,
    'eps_blocks': str,
    'e0': float,
    'm1': float,
    'n1': float,
    'samples': int,
    'seed': int,
    'tol': float,
}


def fail(message, code):
    return CommandError(message, returncode=code)


def floats(text, count, label):
    try:
        values = [float(item) for item in str(text).split(',')]
    except ValueError:
        raise ConfigurationError(f"{label} inválido: {text!r}.")
    if len(values) != count:
        raise ConfigurationError(f"{label} precisa de {count} valores separados por vírgula, recebeu {text!r}.")
    return values


def parse_point(text):
    return np.array(floats(text, 2, '--point'))


def parse_ambient(text):
    """
    'k1,k2,k0,eps' -> AmbientMetric.
    """
    k1, k2, k0, eps = floats(text, 4, '--ambient')
    if eps not in (1.0, -1.0):
        raise ConfigurationError(f"eps do ambiente precisa ser +1 ou -1, recebeu {eps:g}.")
    return AmbientMetric(k1=k1, k2=k2, k0=k0, eps=int(eps))


def parse_grid(text, ranges=None):
    """
    'NX,NY' -> Grid; `ranges` = (x_range, y_range) troca o retângulo padrão [-1, 1]².
    """
    nx, ny = floats(text, 2, '--grid')
    if nx != int(nx) or ny != int(ny):
        raise ConfigurationError(f"--grid espera inteiros, recebeu {text!r}.")
    if ranges is None:
        return Grid(int(nx), int(ny))
    return Grid(int(nx), int(ny), *ranges)


def parse_boundary(tokens):
    """
    Dados de Dirichlet de `solve --boundary`.

    Aceita `linear:a,b,c`, `file PATH` ou o nome de uma superfície do
    catálogo. Devolve (função de contorno, ambiente sugerido, retângulo
    sugerido); as sugestões são None quando não há uma natural. Com `file`
    o retângulo é o da grade gravada.
    """
    tokens = list(tokens or [])
    if not tokens:
        raise ConfigurationError("--boundary é obrigatório.")
    kind = tokens[0]
    if kind == 'file':
        if len(tokens) != 2:
            raise ConfigurationError("Use --boundary file PATH.")
        solution = read_solution(tokens[1])
        ranges = (solution.grid.x_range, solution.grid.y_range)
        return boundary_from_solution(solution), solution.ambient, ranges
    if len(tokens) != 1:
        raise ConfigurationError(f"--boundary inválido: {' '.join(tokens)!r}.")
    if kind.startswith('linear:'):
        a, b, c = floats(kind.partition(':')[2], 3, '--boundary linear')
        return linear_boundary(a, b, c), None, None
    spec = get_surface(kind)
    return boundary_from_surface(spec), spec.ambient, None


def _assembled_field(text):
    """
    'scherk,n=2,eps=1,-1,e0=0.3' -> AssembledMetricField.

    Os sinais de eps vêm separados por vírgula, como o resto; por isso
    cada item sem '=' é anexado à chave anterior.
    """
    name, _, rest = text.partition(',')
    options = {}
    last = None
    for item in filter(None, (part.strip() for part in rest.split(','))):
        key, sep, value = item.partition('=')
        if sep:
            last = key.strip()
            options[last] = [value.strip()]
        elif last is not None:
            options[last].append(item)
        else:
            raise ConfigurationError(f"Opção inválida em --metric: {item!r}.")
    unknown = set(options) - {'n', 'eps', 'e0', 'm1', 'n1'}
    if unknown:
        raise ConfigurationError(f"Opções desconhecidas em --metric: {', '.join(sorted(unknown))}.")
    try:
        n = int(options.get('n', ['1'])[0])
        cfg = AssemblyConfig(
            n=n,
            eps_blocks=','.join(options.get('eps', ['1'] * n)),
            e0=float(options.get('e0', ['0'])[0]),
            m1=float(options.get('m1', ['0'])[0]),
            n1=float(options.get('n1', ['0'])[0]),
        )
    except ValueError as e:
        if isinstance(e, ConfigurationError):
            raise
        raise ConfigurationError(f"Valor inválido em --metric: {e}")
    return AssembledMetricField(get_surface(name), cfg)


def parse_metric(text):
    """
    Campo de métrica de `curvature --metric`:
    flat[:s1,s2,...] | polar | sphere:a | assembled:NOME,n=..,eps=..,e0=..,m1=..,n1=..
    """
    kind, _, argument = str(text).partition(':')
    if kind == 'flat':
        signs = floats(argument, len(argument.split(',')), '--metric flat') if argument else (1, 1, 1, 1)
        if any(sign == 0 for sign in signs):
            raise ConfigurationError("Sinais da métrica plana não podem ser zero.")
        return flat_metric(signs)
    if kind == 'polar' and not argument:
        return polar_metric()
    if kind == 'sphere':
        (radius,) = floats(argument or '1', 1, '--metric sphere')
        if not radius > 0:
            raise ConfigurationError("O raio da esfera precisa ser positivo.")
        return sphere_metric(radius)
    if kind == 'assembled' and argument:
        return _assembled_field(argument)
    raise ConfigurationError(f"--metric inválido: {text!r}.")


def read_config_file(path):
    """
    Valores de um arquivo chave=valor (python-decouple); só as chaves de
    CONFIG_KEYS presentes no arquivo entram no resultado.
    """
    repository = RepositoryEnv(path)
    source = Config(repository)
    values = {}
    for key, cast in CONFIG_KEYS.items():
        if key in repository:
            try:
                values[key] = source(key, cast=cast)
            except ValueError:
                raise ConfigurationError(f"{path}: valor inválido para '{key}'.")
    return values


def default_ambient(suggested):
    return suggested if suggested is not None else EUCLIDEAN
