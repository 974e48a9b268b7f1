import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from geometry.exceptions import ConfigurationError, InadmissiblePoint
from geometry.geometry2d import sample
from geometry.sampling import admissible_points
from geometry.surfaces import (
    BUILDERS, MINIMAL_NAMES, AmbientMetric, catalog, get_surface, mean_curvature, minimal_residual,
)


class CatalogTests(SimpleTestCase):

    def test_catalog_lists_every_builder(self):
        self.assertEqual([spec.name for spec in catalog()], list(BUILDERS))

    def test_minimal_residual_vanishes_on_minimal_surfaces(self):
        for name in MINIMAL_NAMES:
            spec = get_surface(name)
            points, _ = admissible_points(spec, 25, seed=3)
            self.assertEqual(len(points), 25, name)
            residual = minimal_residual(spec, points)
            self.assertLess(np.max(np.abs(residual)), 1e-9, name)

    def test_nonminimal_control_residual(self):
        spec = get_surface('nonminimal_x2')
        points = np.array([[0.3, -0.2], [-0.7, 0.5], [0.0, 0.0]])
        assert_allclose(minimal_residual(spec, points), [2.0, 2.0, 2.0])

    def test_mean_curvature(self):
        assert_allclose(mean_curvature(get_surface('plane'), [0.2, 0.4]), 0.0, atol=1e-15)
        assert_allclose(mean_curvature(get_surface('nonminimal_x2'), [0.0, 0.3]), 2.0)

    def test_admissibility(self):
        self.assertTrue(get_surface('scherk').is_admissible([0.3, 0.2]))
        self.assertFalse(get_surface('helicoid').is_admissible([-0.5, 0.0]))
        self.assertFalse(get_surface('catenoid').is_admissible([0.5, 0.5]))
        self.assertTrue(get_surface('catenoid').is_admissible([1.5, 0.5]))
        self.assertFalse(get_surface('born_infeld_plus').is_admissible([0.3, -0.3]))

    def test_jet_outside_domain(self):
        with self.assertRaises(InadmissiblePoint):
            get_surface('catenoid').jet(np.array([0.1, 0.1]))

    def test_light_like_linear_wave_is_rejected(self):
        with self.assertRaises(ConfigurationError):
            get_surface('born_infeld_minus', {'profile': 'linear', 'slope': 1.0})
        spec = get_surface('born_infeld_plus', {'profile': 'linear'})
        self.assertEqual(spec.parameters['slope'], 2.0)
        points, _ = admissible_points(spec, 10, seed=1)
        self.assertEqual(len(points), 10)
        assert_allclose(sample(spec, points).w2, 3.0)

    def test_parameters(self):
        spec = get_surface('plane', {'a': '2', 'b': 0, 'c': 1})
        self.assertEqual(spec.parameters, {'a': 2.0, 'b': 0.0, 'c': 1.0})
        jet = spec.jet(np.array([0.5, 0.5]))
        self.assertAlmostEqual(float(jet.value), 2.0)


class SurfaceErrorTests(SimpleTestCase):

    def test_unknown_surface(self):
        with self.assertRaises(ConfigurationError):
            get_surface('nosuch')

    def test_unknown_parameter(self):
        with self.assertRaises(ConfigurationError):
            get_surface('scherk', {'a': 1})

    def test_unknown_profile(self):
        with self.assertRaises(ConfigurationError):
            get_surface('born_infeld_plus', {'profile': 'cubic'})

    def test_ambient_validation(self):
        with self.assertRaises(ConfigurationError):
            AmbientMetric(eps=2)
        with self.assertRaises(ConfigurationError):
            AmbientMetric(k1=1.0, k2=1.0, k0=1.0)
        self.assertEqual(AmbientMetric(k1=1.0, k2=-1.0).signature, 0)


class CatalogAdmissibilityTests(SimpleTestCase):

    def test_weights_and_rho_on_euclidean_entries(self):
        for spec in catalog():
            if spec.ambient.signature != 2:
                continue
            points, _ = admissible_points(spec, 40, seed=8)
            s = sample(spec, points)
            self.assertTrue(np.all(s.rho > 0), spec.name)
            self.assertTrue(np.all(s.w1 != 0) and np.all(s.w2 != 0), spec.name)

    def test_mean_curvature_matches_residual(self):
        # H = ρ^{-3/2} × resíduo no ambiente euclidiano
        spec = get_surface('nonminimal_x2')
        points = np.array([[0.3, -0.2], [-0.7, 0.5], [0.9, 0.1]])
        rho = 1.0 + 4.0 * points[:, 0] ** 2
        assert_allclose(mean_curvature(spec, points), rho ** -1.5 * minimal_residual(spec, points), rtol=1e-13)
        assert_allclose(mean_curvature(spec, points), 2.0 * rho ** -1.5, rtol=1e-13)
