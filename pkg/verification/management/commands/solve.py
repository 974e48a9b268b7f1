import json
import logging

from django.conf import settings
from django.core.management.base import BaseCommand

from geometry.exceptions import ConfigurationError, NoConvergence, SolverError
from geometry.solver import solve_minimal, write_solution
from verification.cli import (
    EXIT_FAIL, EXIT_IO, EXIT_USAGE, default_ambient, fail, parse_ambient, parse_boundary, parse_grid,
)

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Resolve a equação mínima discreta com dados de Dirichlet e grava a solução em minsurf v1."

    def add_arguments(self, parser):
        parser.add_argument(
            '--boundary', nargs='+', required=True,
            help="scherk | linear:a,b,c | file PATH | outro nome do catálogo",
        )
        parser.add_argument('--ambient', help="k1,k2,k0,eps (padrão: o da superfície ou euclidiano)")
        parser.add_argument(
            '--grid', default='65,65',
            help="NX,NY; o retângulo é [-1, 1]², ou o da grade gravada com --boundary file",
        )
        parser.add_argument('--tol', type=float, default=settings.RICCIFLAT['SOLVER_TOL'])
        parser.add_argument('--max-iter', type=int, default=settings.RICCIFLAT['SOLVER_MAX_ITER'])
        parser.add_argument('--out', required=True)

    def _print_history(self, history):
        for iteration, residual in enumerate(history):
            self.stdout.write(json.dumps({'iteration': iteration, 'residual': residual}))

    def _write(self, solution, path):
        try:
            write_solution(solution, path)
        except OSError as e:
            raise fail(f"Não foi possível gravar {path}: {e}", EXIT_IO)

    def handle(self, *args, **options):
        try:
            boundary, suggested, ranges = parse_boundary(options['boundary'])
            ambient = parse_ambient(options['ambient']) if options['ambient'] else default_ambient(suggested)
            grid = parse_grid(options['grid'], ranges)
            if options['max_iter'] < 1:
                raise ConfigurationError("--max-iter precisa ser positivo.")
        except ConfigurationError as e:
            raise fail(str(e), EXIT_USAGE)
        except OSError as e:
            raise fail(f"Erro de E/S: {e}", EXIT_IO)

        try:
            solution = solve_minimal(boundary, ambient, grid, tol=options['tol'], max_iter=options['max_iter'])
        except NoConvergence as e:
            self._print_history(e.history)
            if e.solution is not None:
                self._write(e.solution, options['out'])
            raise fail(str(e), EXIT_FAIL)
        except ConfigurationError as e:
            raise fail(str(e), EXIT_USAGE)
        except SolverError as e:
            raise fail(str(e), EXIT_FAIL)

        self._print_history(solution.residual_history)
        self._write(solution, options['out'])
        logger.info(
            "Convergiu em %d iterações (resíduo %.3e) -> %s",
            len(solution.residual_history) - 1, solution.final_residual, options['out'],
        )
