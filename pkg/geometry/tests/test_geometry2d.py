import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from geometry import jets
from geometry.curvature import ricci
from geometry.exceptions import DomainError, RHO_NONPOSITIVE
from geometry.geometry2d import (
    CHECK_NAMES, CheckConstants, GraphGeometry, _values, check_identities, gaussian_K, laplace_beltrami, ricci_two,
    sample,
)
from geometry.sampling import admissible_points
from geometry.surfaces import MINIMAL_NAMES, AmbientMetric, Domain, SurfaceSpec, get_surface, _seeded

IDENTITY_TOL = 1e-9

# P4b e CC1 dependem de log ξ; na onda de Born–Infeld ξ1 < 0 e eles ficam de fora
LOG_CHECKS = ('P4b', 'P4c', 'MU', 'CC1')


def _worst(result):
    values = result.normalized
    return None if np.all(np.isnan(values)) else float(np.nanmax(values))


class SampleTests(SimpleTestCase):

    def test_flat_graph(self):
        s = sample(get_surface('plane', {'a': 0, 'b': 0, 'c': 0}), [0.1, 0.2])
        assert_allclose(s.h, np.eye(2))
        assert_allclose(s.g, np.eye(2))
        self.assertAlmostEqual(float(s.rho), 1.0)
        for value in (s.K, s.H, s.lambda0, s.psi0):
            self.assertAlmostEqual(float(value), 0.0)
        self.assertAlmostEqual(float(s.w1), 1.0)
        self.assertAlmostEqual(float(s.w2), 1.0)

    def test_scherk_reference_values(self):
        p = [0.3, 0.2]
        s = sample(get_surface('scherk'), p)
        tx, ty = np.tan(0.3), np.tan(0.2)
        rho = 1.0 + tx ** 2 + ty ** 2
        fxx, fyy = 1.0 + tx ** 2, -(1.0 + ty ** 2)
        expected_K = ((fxx + fyy) ** 2 - (fxx ** 2 + fyy ** 2)) / rho ** 2
        self.assertAlmostEqual(float(s.rho), rho, places=13)
        assert_allclose(s.rho, 1.13678, rtol=1e-5)
        assert_allclose(s.K, expected_K, rtol=1e-12)
        assert_allclose(s.K, -1.7655, rtol=1e-3)
        assert_allclose(gaussian_K(get_surface('scherk'), p), s.K)
        self.assertAlmostEqual(float(s.H), 0.0, places=12)
        assert_allclose(s.g, s.h / np.sqrt(rho))
        assert_allclose(s.g_inv @ s.g, np.eye(2), atol=1e-14)
        self.assertAlmostEqual(float(s.psi0), -0.25 * np.log(rho))

    def test_nonminimal_at_critical_point(self):
        s = sample(get_surface('nonminimal_x2'), [0.0, 0.4])
        self.assertAlmostEqual(float(s.rho), 1.0)
        assert_allclose(s.h_inv, np.eye(2))
        self.assertAlmostEqual(float(s.H), 2.0)

    def test_ricci_two_is_half_K_h_for_minimal(self):
        spec = get_surface('catenoid')
        points, _ = admissible_points(spec, 10, seed=5)
        s = sample(spec, points)
        assert_allclose(ricci_two(spec, points), 0.5 * s.K[:, None, None] * s.h, atol=1e-10)

    def test_batch_matches_single_points(self):
        spec = get_surface('helicoid')
        points = np.array([[0.5, 0.3], [1.2, -0.8]])
        batch = sample(spec, points)
        for k, point in enumerate(points):
            single = sample(spec, point)
            assert_allclose(batch.g[k], single.g)
            assert_allclose(batch.K[k], single.K)

    def test_rho_nonpositive(self):
        lorentz = SurfaceSpec(
            name='steep',
            phi=_seeded(lambda x, y: 2.0 * y),
            ambient=AmbientMetric(k1=1.0, k2=-1.0, k0=0.0, eps=1),
            domain=Domain(-1.0, 1.0, -1.0, 1.0),
        )
        with self.assertRaises(DomainError) as ctx:
            sample(lorentz, [0.1, 0.1])
        self.assertEqual(ctx.exception.reason, RHO_NONPOSITIVE)


class LaplaceBeltramiTests(SimpleTestCase):

    def test_flat_metric(self):
        x, y = jets.jet_var('x', 0.3), jets.jet_var('y', -0.4)
        zero = x * 0.0
        metric = [[zero + 1.0, zero], [zero, zero + 1.0]]
        self.assertAlmostEqual(float(laplace_beltrami(metric, x * x + y * y)), 4.0)

    def test_polar_metric(self):
        # diag(1, r²): ∇²(r²) = 4
        x = jets.jet_var('x', 0.7)
        zero = x * 0.0
        metric = [[zero + 1.0, zero], [zero, x * x]]
        self.assertAlmostEqual(float(laplace_beltrami(metric, x * x)), 4.0, places=12)

    def test_conformally_flat_metric(self):
        # e^{2λ} I: ∇²f = e^{-2λ} Δf
        x, y = jets.jet_var('x', 0.4), jets.jet_var('y', -0.3)
        factor = jets.exp(2.0 * (0.3 * x + 0.1 * y * y))
        zero = x * 0.0
        metric = [[factor, zero], [zero, factor]]
        f = x * x * y + jets.sin(y)
        expected = np.exp(-2.0 * (0.3 * 0.4 + 0.1 * 0.09)) * (2.0 * -0.3 - np.sin(-0.3))
        self.assertAlmostEqual(float(laplace_beltrami(metric, f)), expected, places=12)

    def test_finite_difference_on_scherk(self):
        spec = get_surface('scherk')
        points = np.array([[0.3, 0.2], [-0.9, 1.1], [1.2, -0.4]])
        x, y = jets.jet_var('x', points[:, 0]), jets.jet_var('y', points[:, 1])
        f = jets.sin(x) + x * y
        exact = laplace_beltrami(GraphGeometry(spec, points).g, f)

        def flux(q):
            s = sample(spec, q)
            df = np.stack([np.cos(q[:, 0]) + q[:, 1], q[:, 0]], axis=-1)
            root = np.sqrt(np.abs(np.linalg.det(s.g)))
            return root[:, None] * np.einsum('...ab,...b->...a', s.g_inv, df), root

        _, root = flux(points)
        assert_allclose(exact, _divergence_fd(flux, points) / root, rtol=1e-6, atol=1e-6)


def _divergence_fd(flux, points, step=1e-4):
    total = 0.0
    for axis in range(2):
        shift = np.zeros(2)
        shift[axis] = step
        forward, _ = flux(points + shift)
        backward, _ = flux(points - shift)
        total = total + (forward[..., axis] - backward[..., axis]) / (2.0 * step)
    return total


class IdentityCheckTests(SimpleTestCase):

    def test_every_check_is_reported(self):
        results = check_identities(get_surface('scherk'), np.array([[0.3, 0.2]]))
        self.assertEqual(set(results), set(CHECK_NAMES))

    def test_identities_hold_on_minimal_surfaces(self):
        for name in MINIMAL_NAMES:
            spec = get_surface(name)
            points, _ = admissible_points(spec, 30, seed=11)
            results = check_identities(spec, points)
            for check, result in results.items():
                worst = _worst(result)
                if worst is None:
                    self.assertIn(check, LOG_CHECKS, f"{name}/{check}")
                    continue
                self.assertLess(worst, IDENTITY_TOL, f"{name}/{check}")

    def test_identities_with_random_constants(self):
        rng = np.random.default_rng(2024)
        draws = [CheckConstants(*rng.uniform(-2.0, 2.0, size=5)) for _ in range(3)]
        for name in MINIMAL_NAMES:
            spec = get_surface(name)
            points, _ = admissible_points(spec, 100, seed=1)
            for consts in draws:
                results = check_identities(spec, points, consts)
                for check, result in results.items():
                    worst = _worst(result)
                    if worst is None:
                        self.assertIn(check, LOG_CHECKS, f"{name}/{check}")
                        continue
                    self.assertLess(worst, IDENTITY_TOL, f"{name}/{check} {consts}")

    def test_constant_dependent_residuals_scale_linearly(self):
        spec = get_surface('nonminimal_x2')
        points = np.array([[0.3, 0.2], [-0.5, 0.4], [0.8, -0.6]])
        base = CheckConstants(0.7, -1.3, 0.4, 1.1, 0.6)
        scaled = CheckConstants(*(3.0 * v for v in (base.a0, base.a1, base.a2, base.b1, base.b2)))
        first, second = check_identities(spec, points, base), check_identities(spec, points, scaled)
        for check in ('P4a', 'P4b', 'P4c'):
            assert_allclose(second[check].raw, 3.0 * first[check].raw, rtol=1e-9, atol=1e-12, err_msg=check)
        # μ é bilinear em a0 e (b1, b2)
        assert_allclose(second['MU'].raw, 9.0 * first['MU'].raw, rtol=1e-9, atol=1e-12)

    def test_curvature_convention_on_scherk(self):
        # R = -¼ g^{αβ} tr[∂_α g⁻¹ ∂_β g] fixa o sinal do escalar do motor
        points = np.array([[0.3, 0.2], [-0.9, 1.1]])
        results = check_identities(get_surface('scherk'), points)
        self.assertLess(_worst(results['P3a']), IDENTITY_TOL)
        scalar = ricci(GraphGeometry(get_surface('scherk'), points).metric_jet('g')).scalar
        self.assertTrue(np.all(np.abs(scalar) > 1e-6))

    def test_log_checks_skip_on_born_infeld(self):
        spec = get_surface('born_infeld_plus')
        points, _ = admissible_points(spec, 10, seed=4)
        results = check_identities(spec, points)
        self.assertTrue(np.all(results['P4b'].skipped))
        self.assertEqual(results['P4b'].reason, 'LOG_DOMAIN')
        self.assertTrue(np.all(results['CC1'].skipped))

    def test_nonminimal_control_fails(self):
        points = np.array([[0.0, 0.2], [0.5, -0.3]])
        results = check_identities(get_surface('nonminimal_x2'), points)
        self.assertGreater(float(np.max(results['P5'].raw)), 1e-3)
        self.assertGreater(_worst(results['PHI-H']), 1e-3)


class DivergenceCheckTests(SimpleTestCase):
    """
    P2a e P5 refeitos por diferenças centrais do fluxo, no controle não mínimo
    (onde as divergências não se anulam).
    """

    def setUp(self):
        self.spec = get_surface('nonminimal_x2')
        self.points = np.array([[0.3, 0.2], [-0.5, 0.4], [0.8, -0.6]])
        self.results = check_identities(self.spec, self.points)

    def test_p2a_divergence(self):
        def flux(q):
            s = sample(self.spec, q)
            dphi = np.moveaxis(self.spec.phi(q).gradient, 0, -1)
            vector = np.sqrt(s.rho)[:, None] * np.einsum('...ab,...b->...a', s.h_inv, dphi)
            return vector, None

        expected = np.abs(_divergence_fd(flux, self.points))
        self.assertTrue(np.all(expected > 1e-2))
        assert_allclose(self.results['P2a'].raw, expected, rtol=1e-6)

    def test_p5_divergence(self):
        def flux(q):
            geo = GraphGeometry(self.spec, q)
            g_inv = _values(geo.g_inv)
            dg = np.stack([
                np.moveaxis(np.array([[entry.partial(*d) for entry in row] for row in geo.g]), (0, 1), (-2, -1))
                for d in ((1, 0), (0, 1))
            ], axis=-3)
            # M^a_{ik} = g^{ab} g^{ij} ∂_b g_{jk}; o eixo do divergente vai para o fim
            matrix = np.einsum('...ab,...ij,...bjk->...ika', g_inv, g_inv, dg)
            return matrix, None

        divergence = _divergence_fd(flux, self.points)
        expected = np.max(np.abs(divergence), axis=(-2, -1))
        self.assertTrue(np.all(expected > 1e-3))
        assert_allclose(self.results['P5'].raw, expected, rtol=1e-6)
