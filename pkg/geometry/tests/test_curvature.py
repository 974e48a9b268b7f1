import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from geometry.assembly import AssembledMetricField, AssemblyConfig
from geometry.curvature import (
    MetricJet, bianchi_residual_fd, christoffel, flat_metric, polar_metric, ricci, ricci_fd, sphere_metric,
)
from geometry.exceptions import SingularMetric
from geometry.surfaces import get_surface


class CalibrationTests(SimpleTestCase):

    def test_sphere_scalar(self):
        point = np.array([1.0, 0.5])
        for a in (0.5, 1.0, 2.0):
            report = ricci(sphere_metric(a).metric_jet(point), point)
            assert_allclose(report.scalar, 2.0 / a ** 2, rtol=1e-10)
            # Ricci = g / a² em duas dimensões
            assert_allclose(report.ricci, sphere_metric(a).components(point) / a ** 2, rtol=1e-10, atol=1e-14)

    def test_flat_and_polar_are_ricci_flat(self):
        point = np.array([0.7, 0.3])
        for field in (flat_metric(), flat_metric((1, -1, 1, -1)), polar_metric()):
            report = ricci(field.metric_jet(point))
            assert_allclose(report.ricci, 0.0, atol=1e-12)
            assert_allclose(report.riemann, 0.0, atol=1e-12)

    def test_polar_christoffel(self):
        m = polar_metric().metric_jet(np.array([0.7, 0.3]))
        gamma = christoffel(m)
        self.assertAlmostEqual(float(gamma[0, 1, 1]), -0.7)
        self.assertAlmostEqual(float(gamma[1, 0, 1]), 1.0 / 0.7)
        self.assertAlmostEqual(float(gamma[1, 1, 0]), 1.0 / 0.7)
        self.assertAlmostEqual(float(gamma[0, 0, 0]), 0.0)

    def test_batch_shape(self):
        points = np.array([[0.4, 0.1], [0.8, -0.2], [1.2, 0.0]])
        report = ricci(sphere_metric(1.5).metric_jet(points))
        self.assertEqual(report.ricci.shape, (3, 2, 2))
        self.assertEqual(report.riemann.shape, (3, 2, 2, 2, 2))
        assert_allclose(report.scalar, 2.0 / 1.5 ** 2)

    def test_einstein_vanishes_in_two_dimensions(self):
        m = sphere_metric(2.0).metric_jet(np.array([1.0, 0.5]))
        assert_allclose(ricci(m).einstein(m.components), 0.0, atol=1e-12)

    def test_singular_metric(self):
        m = MetricJet(np.zeros((2, 2)), np.zeros((2, 2, 2)), np.zeros((2, 2, 2, 2)))
        with self.assertRaises(SingularMetric):
            ricci(m)
        rank_one = MetricJet(np.ones((2, 2)), np.zeros((2, 2, 2)), np.zeros((2, 2, 2, 2)))
        with self.assertRaises(SingularMetric):
            ricci(rank_one)

    def test_blocks_at_different_scales_are_invertible(self):
        # det = 1e-12 com max|g| = 1, mas o número de condição é só 1e3
        field = flat_metric((1.0, 1.0, 1e-3, 1e-3, -1e-3, -1e-3))
        report = ricci(field.metric_jet(np.array([0.2, 0.1])))
        assert_allclose(report.ricci, 0.0, atol=1e-12)

    def test_well_conditioned_assembled_metric(self):
        field = AssembledMetricField(get_surface('scherk'), AssemblyConfig(n=2, eps_blocks=(1, -1), m1=1.0, n1=0.5))
        point = np.array([-0.43385993, -1.31385387])
        report = ricci(field.metric_jet(point))
        self.assertLess(float(report.normalized_ricci), 1e-7)
        self.assertEqual(christoffel(field.metric_jet(point)).shape, (6, 6, 6))


class FiniteDifferenceOracleTests(SimpleTestCase):

    def test_sphere_richardson_ratio(self):
        field = sphere_metric(1.0)
        point = np.array([1.0, 0.5])
        exact = ricci(field.metric_jet(point)).ricci
        coarse = np.max(np.abs(ricci_fd(field.components, point, 1e-2) - exact))
        fine = np.max(np.abs(ricci_fd(field.components, point, 5e-3) - exact))
        self.assertTrue(3.5 <= coarse / fine <= 4.5, coarse / fine)

    def test_assembled_scherk_agreement(self):
        field = AssembledMetricField(get_surface('scherk'), AssemblyConfig(n=1))
        point = np.array([0.3, 0.2])
        exact = ricci(field.metric_jet(point)).ricci
        self.assertLess(np.max(np.abs(exact)), 1e-10)
        coarse = np.max(np.abs(ricci_fd(field, point, 1e-3) - exact))
        fine = np.max(np.abs(ricci_fd(field, point, 5e-4) - exact))
        self.assertLess(coarse, 1e-4)
        self.assertTrue(3.5 <= coarse / fine <= 4.5, coarse / fine)

    def test_bianchi_identity(self):
        field = AssembledMetricField(get_surface('nonminimal_x2'), AssemblyConfig(n=1))
        residual = bianchi_residual_fd(field.metric_jet, np.array([0.3, 0.2]), 1e-3)
        self.assertLess(float(residual), 1e-4)
        self.assertLess(float(bianchi_residual_fd(sphere_metric(1.0).metric_jet, np.array([1.0, 0.5]))), 1e-8)
