"""
Pipeline de verificação: sorteia pontos admissíveis, avalia as identidades
do gráfico, monta a métrica de dimensão 2N, calcula o Ricci e agrega tudo num
relatório.
"""
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from geometry.assembly import AssembledMetricField, AssemblyConfig, assembled_checks, assembled_ricci, signature_of
from geometry.curvature import ricci_fd
from geometry.exceptions import ConfigurationError, INADMISSIBLE, NEAR_SINGULAR, RicciFlatError, SingularMetric
from geometry.geometry2d import CheckConstants, GraphGeometry, identity_checks
from geometry.sampling import PointSampler
from geometry.solver import grid_surface, read_solution
from geometry.surfaces import get_surface

from .reports import build_report

logger = logging.getLogger(__name__)


def defaults():
    """
    Valores numéricos padrão (settings.RICCIFLAT).
    """
    return dict(settings.RICCIFLAT)


@dataclass(frozen=True)
class SurfaceSource:
    """
    De onde vem a superfície: nome do catálogo (com parâmetros) ou arquivo de grade.

    Guarda só dados simples para que possa ser enviada a processos de trabalho,
    que reconstroem a SurfaceSpec com `build()`.
    """
    name: str = None
    params: tuple = ()
    grid: str = None

    def __post_init__(self):
        if bool(self.name) == bool(self.grid):
            raise ConfigurationError("Informe exatamente um entre superfície e arquivo de grade.")

    @property
    def label(self):
        return self.name if self.name else f'grid:{os.path.basename(self.grid)}'

    def build(self):
        if self.grid:
            return grid_surface(read_solution(self.grid), name=self.label)
        return get_surface(self.name, dict(self.params))


@dataclass(frozen=True)
class VerifyOptions:
    source: SurfaceSource
    config: AssemblyConfig
    samples: int = 100
    seed: int = 42
    tol: float = 1e-7
    identity_tol: float = 1e-9
    oracle: bool = False
    fd_step: float = 1e-3
    workers: int = 1
    redraw_factor: int = 10
    constants: CheckConstants = field(default_factory=CheckConstants)

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigurationError(f"samples precisa ser positivo, recebeu {self.samples}.")
        if not (self.tol > 0 and self.identity_tol > 0):
            raise ConfigurationError("Tolerâncias precisam ser positivas.")
        if self.workers < 1 or self.redraw_factor < 1:
            raise ConfigurationError("workers e redraw_factor precisam ser positivos.")


def parse_params(items):
    """
    ['a=1', 'profile=sinh'] -> (('a', 1.0), ('profile', 'sinh')), ordenado por chave.
    """
    params = {}
    for item in items or ():
        key, sep, value = str(item).partition('=')
        if not sep or not key.strip():
            raise ConfigurationError(f"Parâmetro inválido: {item!r} (use chave=valor).")
        value = value.strip()
        try:
            params[key.strip()] = float(value)
        except ValueError:
            params[key.strip()] = value
    return tuple(sorted(params.items()))


def build_options(surface=None, grid=None, params=None, n=1, eps_blocks=None, e0=0.0, m1=0.0, n1=0.0,
                  samples=None, seed=None, tol=None, identity_tol=None, oracle=False, workers=None):
    """
    VerifyOptions a partir de valores soltos (flags, arquivo de configuração,
    corpo da API); o que faltar vem de settings.RICCIFLAT.
    """
    base = defaults()
    try:
        n = int(n)
        config = AssemblyConfig(
            n=n,
            eps_blocks=eps_blocks if eps_blocks not in (None, '') else (1,) * max(n, 1),
            e0=float(e0),
            m1=float(m1),
            n1=float(n1),
        )
        return VerifyOptions(
            source=SurfaceSource(name=surface or None, params=parse_params(params), grid=grid or None),
            config=config,
            samples=int(samples if samples is not None else base['SAMPLES']),
            seed=int(seed if seed is not None else base['SEED']),
            tol=float(tol if tol is not None else base['TOL']),
            identity_tol=float(identity_tol if identity_tol is not None else base['IDENTITY_TOL']),
            oracle=bool(oracle),
            fd_step=float(base['FD_STEP']),
            workers=int(workers if workers is not None else base['WORKERS']),
            redraw_factor=int(base['REDRAW_FACTOR']),
        )
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Opção inválida: {e}")


# avaliação

@dataclass
class PointBatch:
    points: np.ndarray
    checks: dict
    ricci_max_abs: np.ndarray
    ricci_normalized: np.ndarray
    signature: np.ndarray
    oracle: np.ndarray = None

    def __len__(self):
        return len(self.points)


def _evaluate(spec, options, points):
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        geo = GraphGeometry(spec, points)
        checks = identity_checks(geo, options.constants)
        metric, curvature = assembled_ricci(geo, options.config)
        checks.update(assembled_checks(geo, options.config, metric))
        if np.any(~np.isfinite(curvature.normalized_ricci)):
            raise SingularMetric("Curvatura não finita.")
        signs = np.atleast_1d(signature_of(metric.components))
        oracle = None
        if options.oracle and not options.source.grid:
            oracle = _oracle(spec, options, points, curvature.ricci)
    return PointBatch(points, checks, curvature.max_abs_ricci, curvature.normalized_ricci, signs, oracle)


def _oracle(spec, options, points, jet_ricci):
    """
    max |Ricci por jatos - Ricci por diferenças| por ponto; NaN onde o
    estêncil sai do domínio.
    """
    field_ = AssembledMetricField(spec, options.config)
    try:
        return np.max(np.abs(jet_ricci - ricci_fd(field_, points, options.fd_step)), axis=(-2, -1))
    except RicciFlatError:
        pass
    differences = np.full(len(points), np.nan)
    for k, point in enumerate(points):
        try:
            differences[k] = np.max(np.abs(jet_ricci[k] - ricci_fd(field_, point, options.fd_step)))
        except RicciFlatError:
            logger.debug("Oráculo indisponível em %s", point)
    return differences


def evaluate_points(spec, options, points):
    """
    Avalia um lote; se o lote falha, divide ao meio até isolar os pontos
    ruins e devolve as falhas como (ponto, motivo).
    """
    if len(points) == 0:
        return None, []
    try:
        return _evaluate(spec, options, points), []
    except RicciFlatError as e:
        if len(points) == 1:
            reason = e.reason or NEAR_SINGULAR
            logger.debug("Ponto %s descartado: %s (%s)", points[0].tolist(), reason, e)
            return None, [(points[0], reason)]
    middle = len(points) // 2
    first, first_failures = evaluate_points(spec, options, points[:middle])
    second, second_failures = evaluate_points(spec, options, points[middle:])
    return concatenate([first, second]), first_failures + second_failures


def concatenate(batches):
    batches = [batch for batch in batches if batch is not None and len(batch)]
    if not batches:
        return None
    first = batches[0]
    checks = {}
    for name, result in first.checks.items():
        parts = [batch.checks[name] for batch in batches]
        checks[name] = type(result)(
            name,
            np.concatenate([np.atleast_1d(part.raw) for part in parts]),
            np.concatenate([np.atleast_1d(np.broadcast_to(part.scale, np.shape(part.raw))) for part in parts]),
            np.concatenate([np.atleast_1d(part.skipped) for part in parts]),
            next((part.reason for part in parts if part.reason), None),
        )
    oracle = None
    if first.oracle is not None:
        oracle = np.concatenate([batch.oracle for batch in batches])
    return PointBatch(
        points=np.concatenate([batch.points for batch in batches]),
        checks=checks,
        ricci_max_abs=np.concatenate([batch.ricci_max_abs for batch in batches]),
        ricci_normalized=np.concatenate([batch.ricci_normalized for batch in batches]),
        signature=np.concatenate([batch.signature for batch in batches]),
        oracle=oracle,
    )


def _evaluate_chunk(options, points):
    # executado nos processos de trabalho: a SurfaceSpec não é serializável
    return evaluate_points(options.source.build(), options, points)


def _dispatch(pool, spec, options, points):
    if pool is None or len(points) < 2 * options.workers:
        return evaluate_points(spec, options, points)
    chunks = np.array_split(points, options.workers)
    futures = [pool.submit(_evaluate_chunk, options, chunk) for chunk in chunks]
    batches, failures = [], []
    for future in futures:
        batch, failed = future.result()
        batches.append(batch)
        failures.extend(failed)
    return concatenate(batches), failures


def run_verification(options):
    """
    Executa a verificação completa e devolve o relatório (dict ordenado).

    Sorteios inadmissíveis ou que falham na avaliação são descartados e
    re-sorteados até redraw_factor × samples sorteios.
    """
    started = time.perf_counter()
    spec = options.source.build()
    sampler = PointSampler(spec.domain, options.seed)
    budget = options.redraw_factor * options.samples
    batches, rejected = [], []
    evaluated = 0

    pool = ProcessPoolExecutor(max_workers=options.workers) if options.workers > 1 else nullcontext()
    with pool as executor:
        while evaluated < options.samples and sampler.drawn < budget:
            count = min(options.samples - evaluated, budget - sampler.drawn)
            candidates = spec.snap(sampler.draw(count))
            mask = spec.is_admissible(candidates)
            rejected.extend((point, INADMISSIBLE) for point in candidates[~mask])
            batch, failures = _dispatch(executor, spec, options, candidates[mask])
            rejected.extend(failures)
            if batch is not None:
                batches.append(batch)
                evaluated += len(batch)

    result = concatenate(batches)
    wall_time_ms = int(round((time.perf_counter() - started) * 1000))
    report = build_report(options, result, rejected, wall_time_ms)
    logger.info(
        "%s [%s]: %s (ricci normalizado %s, %d/%d pontos)",
        options.source.label, options.config.describe(), 'PASSOU' if report['pass'] else 'FALHOU',
        report['ricci']['max_normalized'], report['points_evaluated'], report['points_requested'],
    )
    return report
