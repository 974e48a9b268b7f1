from django.core.management.base import BaseCommand

from geometry.curvature import ricci
from geometry.exceptions import ConfigurationError, DomainError, RicciFlatError
from verification.cli import EXIT_FAIL, EXIT_USAGE, fail, parse_metric, parse_point
from verification.reports import render_json


class Command(BaseCommand):
    help = "Imprime Christoffel, Riemann, Ricci e escalar de uma métrica de teste num ponto."

    def add_arguments(self, parser):
        parser.add_argument(
            '--metric', required=True,
            help="flat[:s1,s2,..] | polar | sphere:a | assembled:NOME,n=..,eps=..,e0=..,m1=..,n1=..",
        )
        parser.add_argument(
            '--point', required=True,
            help="X,Y; com X negativo use a forma --point=-0.4,0.2 (senão o argparse lê -0.4 como opção)",
        )

    def handle(self, *args, **options):
        try:
            field = parse_metric(options['metric'])
            point = parse_point(options['point'])
            metric = field.metric_jet(point)
            report = ricci(metric, point)
        except (ConfigurationError, DomainError) as e:
            raise fail(str(e), EXIT_USAGE)
        except RicciFlatError as e:
            raise fail(str(e), EXIT_FAIL)

        self.stdout.write(render_json({
            'metric': options['metric'],
            'point': point.tolist(),
            'dim': int(metric.dim),
            'components': metric.components.tolist(),
            'christoffel': report.christoffel.tolist(),
            'riemann': report.riemann.tolist(),
            'ricci': report.ricci.tolist(),
            'scalar': float(report.scalar),
            'max_abs_ricci': float(report.max_abs_ricci),
            'normalized_ricci': float(report.normalized_ricci),
        }), ending='')
