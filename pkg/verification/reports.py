"""
Relatório de verificação: montagem com ordem de chaves fixa e escrita em
JSON com floats de 17 dígitos significativos (não finitos viram null).

Esquema, nesta ordem:

    surface, config{n, eps_blocks, e0, m1, m2, n1, n2, dim}, seed,
    points_requested, points_evaluated, points_skipped,
    rejected[{point, reason}],
    per_check{NOME: {max_normalized_residual, max_raw_residual, worst_point, skipped}},
    ricci{max_abs, max_normalized, worst_point},
    oracle{step, max_abs_difference, worst_point} | null,
    signature, pass, tolerances{ricci, identity}, wall_time_ms
"""
import json
import logging
import math

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from geometry.geometry2d import CHECK_NAMES

logger = logging.getLogger(__name__)

ASSEMBLED_CHECKS = ('PHI-EQ', 'DET-M')
REPORT_KEYS = (
    'surface', 'config', 'seed', 'points_requested', 'points_evaluated', 'points_skipped',
    'rejected', 'per_check', 'ricci', 'oracle', 'signature', 'pass', 'tolerances', 'wall_time_ms',
)


def _point(point):
    return [float(v) for v in point]


def _worst(values, points):
    """
    (máximo, ponto do máximo) ignorando NaN; (None, None) se não houver valores.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0 or np.all(np.isnan(values)):
        return None, None
    k = int(np.nanargmax(values))
    return float(values[k]), _point(points[k])


def summarize_checks(result):
    per_check = {}
    for name in CHECK_NAMES + ASSEMBLED_CHECKS:
        if result is None or name not in result.checks:
            per_check[name] = {
                'max_normalized_residual': None, 'max_raw_residual': None, 'worst_point': None, 'skipped': 0,
            }
            continue
        check = result.checks[name]
        normalized, worst_point = _worst(check.normalized, result.points)
        raw, _ = _worst(check.raw, result.points)
        per_check[name] = {
            'max_normalized_residual': normalized,
            'max_raw_residual': raw,
            'worst_point': worst_point,
            'skipped': int(np.count_nonzero(check.skipped)),
        }
    return per_check


def build_report(options, result, rejected, wall_time_ms):
    evaluated = 0 if result is None else len(result)
    per_check = summarize_checks(result)

    if result is None:
        ricci = {'max_abs': None, 'max_normalized': None, 'worst_point': None}
        signature = None
    else:
        max_normalized, worst_point = _worst(result.ricci_normalized, result.points)
        ricci = {
            'max_abs': float(np.max(result.ricci_max_abs)),
            'max_normalized': max_normalized,
            'worst_point': worst_point,
        }
        signature = int(result.signature[0])
        if np.any(result.signature != signature):
            logger.warning("Assinatura varia entre os pontos: %s", sorted(set(result.signature.tolist())))

    oracle = None
    if options.oracle and result is not None and result.oracle is not None:
        difference, worst_point = _worst(result.oracle, result.points)
        oracle = {'step': options.fd_step, 'max_abs_difference': difference, 'worst_point': worst_point}

    identities_ok = all(
        entry['max_normalized_residual'] is None or entry['max_normalized_residual'] < options.identity_tol
        for entry in per_check.values()
    )
    passed = bool(
        evaluated > 0
        and identities_ok
        and ricci['max_normalized'] is not None
        and ricci['max_normalized'] < options.tol
    )

    return {
        'surface': options.source.label,
        'config': options.config.as_dict(),
        'seed': options.seed,
        'points_requested': options.samples,
        'points_evaluated': evaluated,
        'points_skipped': options.samples - evaluated,
        'rejected': [{'point': _point(point), 'reason': reason} for point, reason in rejected],
        'per_check': per_check,
        'ricci': ricci,
        'oracle': oracle,
        'signature': signature,
        'pass': passed,
        'tolerances': {'ricci': options.tol, 'identity': options.identity_tol},
        'wall_time_ms': wall_time_ms,
    }

def _floatstr(value):
    return f'{value:.17g}' if math.isfinite(value) else 'null'


class ReportEncoder(DjangoJSONEncoder):
    """
    Encoder do relatório: floats com 17 dígitos significativos, não finitos
    como null e escalares/arrays numpy como tipos nativos.
    """

    def default(self, o):
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        return super().default(o)

    def iterencode(self, o, _one_shot=False):
        # o encoder em C não aceita outro formato de float
        encoder = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        chunks = json.encoder._make_iterencode(
            {} if self.check_circular else None, self.default, encoder, self.indent, _floatstr,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot,
        )
        return chunks(o, 0)


def render_json(report, indent=2):
    """
    JSON do relatório; determinístico para a mesma entrada.
    """
    return json.dumps(report, cls=ReportEncoder, indent=indent) + '\n'
