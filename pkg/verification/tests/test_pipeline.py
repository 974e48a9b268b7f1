import json
import os
import tempfile
from itertools import product

import numpy as np
from django.test import SimpleTestCase, override_settings

from geometry.exceptions import ConfigurationError
from geometry.solver import Grid, boundary_from_surface, solve_minimal, write_solution
from geometry.surfaces import EUCLIDEAN, MINIMAL_NAMES, get_surface
from verification.pipeline import SurfaceSource, build_options, parse_params, run_verification
from verification.reports import REPORT_KEYS, render_json


def _without_timing(report):
    return {key: value for key, value in report.items() if key != 'wall_time_ms'}


class BuildOptionsTests(SimpleTestCase):

    def test_defaults_come_from_settings(self):
        options = build_options(surface='scherk')
        self.assertEqual(options.samples, 100)
        self.assertEqual(options.seed, 42)
        self.assertEqual(options.tol, 1e-7)
        self.assertEqual(options.config.eps_blocks, (1,))

    @override_settings(RICCIFLAT={
        'SAMPLES': 7, 'SEED': 1, 'TOL': 1e-6, 'IDENTITY_TOL': 1e-8, 'WORKERS': 1,
        'REDRAW_FACTOR': 3, 'FD_STEP': 1e-3, 'SOLVER_TOL': 1e-10, 'SOLVER_MAX_ITER': 50,
    })
    def test_settings_override(self):
        options = build_options(surface='scherk', n=2)
        self.assertEqual(options.samples, 7)
        self.assertEqual(options.redraw_factor, 3)
        self.assertEqual(options.config.eps_blocks, (1, 1))

    def test_invalid_values(self):
        with self.assertRaises(ConfigurationError):
            build_options(surface='scherk', n=2, eps_blocks='1')
        with self.assertRaises(ConfigurationError):
            build_options(surface='scherk', samples='many')
        with self.assertRaises(ConfigurationError):
            build_options(surface='scherk', samples=0)
        with self.assertRaises(ConfigurationError):
            build_options()
        with self.assertRaises(ConfigurationError):
            SurfaceSource(name='scherk', grid='x.txt')

    def test_parse_params(self):
        self.assertEqual(parse_params(['slope=2', 'profile=sinh']), (('profile', 'sinh'), ('slope', 2.0)))
        with self.assertRaises(ConfigurationError):
            parse_params(['slope'])


class RunVerificationTests(SimpleTestCase):

    def test_scherk_instanton(self):
        report = run_verification(build_options(surface='scherk', samples=25))
        self.assertEqual(tuple(report), REPORT_KEYS)
        self.assertTrue(report['pass'])
        self.assertEqual(report['signature'], 4)
        self.assertEqual(report['points_evaluated'], 25)
        self.assertEqual(report['points_evaluated'] + report['points_skipped'], report['points_requested'])
        self.assertLess(report['ricci']['max_normalized'], 1e-7)
        self.assertEqual(report['config']['dim'], 4)
        for name, entry in report['per_check'].items():
            self.assertLess(entry['max_normalized_residual'], 1e-9, name)

    def test_higher_dimension_with_mixed_signs(self):
        report = run_verification(build_options(
            surface='catenoid', n=3, eps_blocks='1,-1,-1', e0=0.3, m1=1.0, n1=0.5, samples=20,
        ))
        self.assertTrue(report['pass'])
        self.assertEqual(report['signature'], 2 * (1 + 1 - 1 - 1))
        self.assertEqual(report['config']['dim'], 8)

    def test_born_infeld_wave(self):
        report = run_verification(build_options(surface='born_infeld_plus', n=2, eps_blocks='1,-1', samples=20))
        self.assertTrue(report['pass'])
        self.assertEqual(report['signature'], 0)
        self.assertEqual(report['per_check']['P4b']['skipped'], 20)
        self.assertIsNone(report['per_check']['P4b']['max_normalized_residual'])

    def test_negative_control(self):
        report = run_verification(build_options(surface='nonminimal_x2', samples=20))
        self.assertFalse(report['pass'])
        self.assertGreater(report['ricci']['max_normalized'], 1e-2)
        self.assertGreater(report['per_check']['P5']['max_normalized_residual'], 1e-3)

    def test_rejected_points_are_reported(self):
        report = run_verification(build_options(surface='catenoid', samples=60))
        self.assertEqual(report['points_evaluated'], 60)
        self.assertTrue(report['rejected'])
        self.assertEqual({entry['reason'] for entry in report['rejected']}, {'INADMISSIBLE'})

    def test_unknown_surface(self):
        with self.assertRaises(ConfigurationError):
            run_verification(build_options(surface='nosuch', samples=5))

    def test_oracle(self):
        report = run_verification(build_options(surface='scherk', samples=5, oracle=True))
        self.assertEqual(report['oracle']['step'], 1e-3)
        self.assertTrue(np.isfinite(report['oracle']['max_abs_difference']))
        self.assertEqual(len(report['oracle']['worst_point']), 2)
        self.assertIsNone(run_verification(build_options(surface='scherk', samples=5))['oracle'])

    def test_same_seed_same_report(self):
        first = run_verification(build_options(surface='helicoid', samples=15, seed=9))
        second = run_verification(build_options(surface='helicoid', samples=15, seed=9))
        self.assertEqual(render_json(_without_timing(first)), render_json(_without_timing(second)))
        other = run_verification(build_options(surface='helicoid', samples=15, seed=10))
        self.assertNotEqual(render_json(_without_timing(first)), render_json(_without_timing(other)))

    def test_grid_source(self):
        sol = solve_minimal(boundary_from_surface(get_surface('scherk')), EUCLIDEAN, Grid(33, 33))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'scherk.txt')
            write_solution(sol, path)
            report = run_verification(build_options(grid=path, samples=10))
        self.assertEqual(report['surface'], 'grid:scherk.txt')
        self.assertEqual(report['points_evaluated'], 10)
        self.assertEqual(report['signature'], 4)
        self.assertIsNone(report['oracle'])


class RenderJsonTests(SimpleTestCase):

    def test_floats_and_nulls(self):
        text = render_json({'a': 0.1, 'b': float('nan'), 'c': [1, 2.5], 'd': True, 'e': None})
        self.assertIn('"a": 0.10000000000000001', text)
        self.assertEqual(json.loads(text), {'a': 0.1, 'b': None, 'c': [1, 2.5], 'd': True, 'e': None})

    def test_key_order_is_kept(self):
        text = render_json({'z': 1, 'a': {'y': 2, 'b': 3}})
        self.assertLess(text.index('"z"'), text.index('"a"'))
        self.assertLess(text.index('"y"'), text.index('"b"'))

    def test_numpy_values(self):
        text = render_json({'n': np.int64(3), 'f': np.float32(0.5), 'x': np.float64(np.inf), 'ok': np.bool_(True),
                            'v': np.array([1.0, 2.0])})
        self.assertEqual(json.loads(text), {'n': 3, 'f': 0.5, 'x': None, 'ok': True, 'v': [1.0, 2.0]})


def _sweep_settings():
    for n in (1, 2, 3):
        seen = set()
        for signs in product((1, -1), repeat=n):
            for e0, m1, n1 in product((0.0, 0.3), (0.0, 1.0), (0.0, (n - 1) / 2, (n - 1) / 4)):
                key = (signs, e0, m1, n1)
                if key not in seen:
                    seen.add(key)
                    yield n, signs, e0, m1, n1


class MinimalSurfaceSweepTests(SimpleTestCase):
    """
    Toda superfície mínima do catálogo em todas as combinações de n, sinais
    e expoentes, com poucos pontos por combinação.
    """

    def test_every_combination_is_ricci_flat_without_dropped_points(self):
        for name in MINIMAL_NAMES:
            for n, signs, e0, m1, n1 in _sweep_settings():
                label = f"{name} n={n} eps={signs} e0={e0} m1={m1} n1={n1}"
                report = run_verification(build_options(
                    surface=name, n=n, eps_blocks=','.join(str(s) for s in signs),
                    e0=e0, m1=m1, n1=n1, samples=8, seed=3,
                ))
                self.assertEqual(report['points_skipped'], 0, label)
                self.assertEqual({entry['reason'] for entry in report['rejected']} - {'INADMISSIBLE'}, set(), label)
                self.assertLess(report['ricci']['max_normalized'], 1e-7, label)
                self.assertTrue(report['pass'], label)
