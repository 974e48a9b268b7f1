import logging

from django.core.management.base import BaseCommand

from geometry.exceptions import ConfigurationError, RicciFlatError
from verification.cli import EXIT_FAIL, EXIT_IO, EXIT_USAGE, fail, read_config_file
from verification.models import VerificationRun
from verification.pipeline import build_options, run_verification
from verification.reports import render_json

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        "Verifica numericamente a planitude de Ricci da métrica montada sobre uma "
        "superfície mínima e imprime o relatório JSON. Saída 0 = passou, 1 = falhou, "
        "2 = flags inválidas, 3 = erro de E/S."
    )

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--surface', help="Nome no catálogo (ex.: scherk, helicoid, born_infeld_plus)")
        source.add_argument('--grid', help="Arquivo minsurf v1 produzido por `solve`")
        parser.add_argument('--param', action='append', default=[], help="Parâmetro da superfície, chave=valor")
        parser.add_argument('--n', type=int)
        parser.add_argument('--eps-blocks', help="Sinais dos blocos y, ex.: 1,-1")
        parser.add_argument('--e0', type=float)
        parser.add_argument('--m1', type=float)
        parser.add_argument('--n1', type=float)
        parser.add_argument('--samples', type=int)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--tol', type=float, help="Tolerância do Ricci normalizado")
        parser.add_argument('--oracle', action='store_true', help="Compara com o Ricci por diferenças finitas")
        parser.add_argument('--json', dest='json_path', help="Também grava o relatório neste arquivo")
        parser.add_argument('--config', help="Arquivo chave=valor com as mesmas chaves das flags")
        parser.add_argument('--workers', type=int)
        parser.add_argument('--save', action='store_true', help="Guarda a execução no banco")

    def handle(self, *args, **options):
        values = {}
        if options['config']:
            try:
                values.update(read_config_file(options['config']))
            except ConfigurationError as e:
                raise fail(str(e), EXIT_USAGE)
            except OSError as e:
                raise fail(f"Não foi possível ler {options['config']}: {e}", EXIT_IO)

        # flag explícita > arquivo de configuração > settings
        for key in ('surface', 'grid', 'n', 'eps_blocks', 'e0', 'm1', 'n1', 'samples', 'seed', 'tol'):
            if options[key] is not None:
                values[key] = options[key]
        if options['surface'] is not None:
            values.pop('grid', None)
        if options['grid'] is not None:
            values.pop('surface', None)

        try:
            verify_options = build_options(
                params=options['param'],
                oracle=options['oracle'],
                workers=options['workers'],
                **{
                    'n': 1, 'e0': 0.0, 'm1': 0.0, 'n1': 0.0,
                    **values,
                },
            )
        except ConfigurationError as e:
            raise fail(str(e), EXIT_USAGE)

        try:
            report = run_verification(verify_options)
        except OSError as e:
            raise fail(f"Erro de E/S: {e}", EXIT_IO)
        except ConfigurationError as e:
            raise fail(str(e), EXIT_USAGE)
        except RicciFlatError as e:
            raise fail(f"Verificação interrompida: {e}", EXIT_FAIL)

        text = render_json(report)
        if options['json_path']:
            try:
                with open(options['json_path'], 'w') as handle:
                    handle.write(text)
            except OSError as e:
                raise fail(f"Não foi possível gravar {options['json_path']}: {e}", EXIT_IO)
        self.stdout.write(text, ending='')

        if options['save']:
            run = VerificationRun.from_report(report)
            logger.info("Execução guardada com id %s", run.id)

        if not report['pass']:
            raise fail(f"{report['surface']}: verificação falhou.", EXIT_FAIL)
