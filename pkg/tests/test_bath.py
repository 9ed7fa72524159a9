import math
import os
import sys
import unittest

from hypothesis import given, settings, strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "squeeze-python"))

import bath  # noqa: E402
from bath import DephasingProfile, Method, SqueezedBathSpec  # noqa: E402
from errors import ConfigError, DomainError, QuadratureError  # noqa: E402


def analytic(r=0.0, theta=0.0):
    return DephasingProfile(SqueezedBathSpec(r=r, theta=theta), Method.ANALYTIC_ZERO_T)


def quadrature(r=0.0, theta=0.0, beta=math.inf):
    return DephasingProfile(SqueezedBathSpec(r=r, theta=theta, beta=beta), Method.QUADRATURE)


class TestBathSpec(unittest.TestCase):
    def test_theta_is_normalized(self):
        spec = SqueezedBathSpec(r=0.5, theta=2.0 * math.pi + 1.0)
        self.assertAlmostEqual(spec.theta, 1.0, places=12)

    def test_rejects_bad_values(self):
        with self.assertRaises(ConfigError):
            SqueezedBathSpec(r=-0.1)
        with self.assertRaises(ConfigError):
            SqueezedBathSpec(beta=0.0)
        with self.assertRaises(ConfigError):
            SqueezedBathSpec(omega_c=0.0)
        with self.assertRaisesRegex(ConfigError, "lorentzian"):
            SqueezedBathSpec(spectral="lorentzian")

    def test_none_beta_is_zero_temperature(self):
        spec = SqueezedBathSpec(beta=None)
        self.assertTrue(spec.zero_temperature)
        self.assertIsNone(spec.to_dict()["beta"])

    def test_with_squeezing_keeps_temperature(self):
        spec = SqueezedBathSpec(r=0.2, theta=0.1, beta=3.0, omega_c=2.0)
        moved = spec.with_squeezing(r=1.0)
        self.assertEqual((moved.r, moved.theta, moved.beta, moved.omega_c), (1.0, 0.1, 3.0, 2.0))
        self.assertEqual(spec.scaled_beta, 6.0)


class TestProfile(unittest.TestCase):
    def test_analytic_needs_zero_temperature(self):
        with self.assertRaisesRegex(ConfigError, "zero temperature"):
            DephasingProfile(SqueezedBathSpec(beta=2.0), Method.ANALYTIC_ZERO_T)

    def test_unknown_method(self):
        with self.assertRaises(ConfigError):
            DephasingProfile(SqueezedBathSpec(), "monte-carlo")

    def test_for_bath_picks_method(self):
        self.assertIs(DephasingProfile.for_bath(SqueezedBathSpec()).method, Method.ANALYTIC_ZERO_T)
        self.assertIs(DephasingProfile.for_bath(SqueezedBathSpec(beta=5.0)).method, Method.QUADRATURE)

    def test_with_bath_falls_back_to_quadrature(self):
        profile = analytic().with_bath(SqueezedBathSpec(beta=1.0))
        self.assertIs(profile.method, Method.QUADRATURE)

    def test_negative_time(self):
        with self.assertRaises(DomainError):
            analytic().gamma(-1.0)
        with self.assertRaises(DomainError):
            quadrature().gamma(-1.0)


class TestClosedForm(unittest.TestCase):
    def test_unsqueezed(self):
        self.assertEqual(analytic().gamma(0.0), 0.0)
        self.assertAlmostEqual(analytic().gamma(1.0), math.log(2.0) / (2.0 * math.pi), places=14)
        self.assertAlmostEqual(analytic().attenuation(1.0), 2.0 ** (-2.0 / math.pi), places=14)

    def test_squeezed_values(self):
        self.assertAlmostEqual(analytic(0.5, 0.0).gamma(1.0), 0.14936, places=4)
        self.assertAlmostEqual(analytic(0.5, math.pi / 2).gamma(1.0), 0.08351, places=4)

    def test_rate_matches_finite_difference(self):
        profile = analytic(0.7, 1.1)
        for tau in (0.3, 1.0, 4.0):
            h = 1e-6
            slope = (profile.gamma(tau + h) - profile.gamma(tau - h)) / (2.0 * h)
            self.assertAlmostEqual(profile.rate(tau), slope, places=7)

    def test_rate_scales_with_cutoff(self):
        fast = DephasingProfile(SqueezedBathSpec(r=0.5, omega_c=3.0), Method.ANALYTIC_ZERO_T)
        self.assertAlmostEqual(fast.rate(1.0), 3.0 * analytic(0.5).rate(1.0), places=12)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.0, 1.5), st.floats(0.0, 2.0 * math.pi), st.floats(0.0, 60.0))
    def test_rate_never_negative(self, r, theta, tau):
        self.assertGreaterEqual(analytic(r, theta).rate(tau), -1e-12)

    def test_monotonic_report(self):
        report = bath.check_monotonic(analytic(1.0, math.pi / 2), points=200)
        self.assertTrue(report.ok)
        self.assertEqual(report.checked, 200)
        self.assertEqual(report.violations, [])


class TestQuadrature(unittest.TestCase):
    def test_matches_closed_form(self):
        for r, theta in ((0.0, 0.0), (0.5, 0.0), (0.5, math.pi / 2), (1.0, math.pi)):
            for tau in (0.1, 1.0, 5.0, 10.0):
                with self.subTest(r=r, theta=theta, tau=tau):
                    self.assertAlmostEqual(quadrature(r, theta).gamma(tau), analytic(r, theta).gamma(tau), places=8)

    def test_rate_matches_closed_form(self):
        self.assertAlmostEqual(quadrature(0.5, 1.0).rate(1.0), analytic(0.5, 1.0).rate(1.0), places=6)
        self.assertEqual(quadrature(0.5, 1.0).rate(0.0), 0.0)

    def test_temperature_increases_dephasing(self):
        hot = quadrature(0.5, 0.3, beta=1.0).gamma(2.0)
        warm = quadrature(0.5, 0.3, beta=10.0).gamma(2.0)
        cold = quadrature(0.5, 0.3).gamma(2.0)
        self.assertGreater(hot, warm)
        self.assertGreater(warm, cold)

    def test_cold_limit_approaches_zero_temperature(self):
        # leading thermal correction at r = 0: (pi / 6) tau^2 / (beta w_c)^2
        tau = 10.0
        zero_t = analytic().gamma(tau)
        for beta in (1e4, 1e5):
            with self.subTest(beta=beta):
                excess = quadrature(beta=beta).gamma(tau) - zero_t
                self.assertGreater(excess, 0.0)
                self.assertAlmostEqual(excess, math.pi / 6.0 * tau * tau / beta ** 2, delta=5e-10)

    def test_thermal_break_points(self):
        self.assertEqual(bath._panel_edges(2.0), bath._panel_edges(2.0, math.inf))
        edges = bath._panel_edges(2.0, 1e5)
        self.assertEqual(edges[0], 0.0)
        self.assertAlmostEqual(edges[1], 1e-5, places=15)
        self.assertAlmostEqual(edges[2], 1e-4, places=15)
        self.assertEqual(edges, sorted(edges))
        self.assertEqual(edges[-1], bath.UPPER_CUTOFF)

    def test_result_reports_panels(self):
        result = bath.gamma_quadrature_result(quadrature(0.5, 0.0), 20.0)
        self.assertGreater(result.panels, 1)
        self.assertGreater(result.evaluations, 0)
        self.assertEqual(bath.gamma_quadrature_result(quadrature(), 0.0).value, 0.0)


class TestAdaptiveIntegral(unittest.TestCase):
    def test_polynomial(self):
        result = bath.adaptive_integral(lambda x: 3.0 * x * x, 0.0, 2.0)
        self.assertAlmostEqual(result.value, 8.0, places=12)

    def test_break_points_outside_interval_are_ignored(self):
        result = bath.adaptive_integral(abs, -1.0, 1.0, points=[0.0, 5.0])
        self.assertAlmostEqual(result.value, 1.0, places=12)

    def test_failure_carries_estimate(self):
        with self.assertRaises(QuadratureError) as ctx:
            bath.adaptive_integral(lambda x: math.sin(100.0 * x), 0.0, 10.0, limit=1)
        self.assertIsNotNone(ctx.exception.estimate)
        self.assertIsNotNone(ctx.exception.abserr)


class TestRegistry(unittest.TestCase):
    def test_ohmic_registered(self):
        self.assertIn("ohmic", bath.available_spectral_densities())
        density = bath.spectral_density("ohmic")
        self.assertAlmostEqual(density.reduced(0.0), 0.5)

    def test_unknown_density(self):
        with self.assertRaises(ConfigError):
            bath.spectral_density("nope")


if __name__ == '__main__':
    unittest.main()
