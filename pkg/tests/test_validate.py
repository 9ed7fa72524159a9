import os
import sys
import unittest

import numpy as np

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "squeeze-python"))

import validate  # noqa: E402
from runner import OrderedPool  # noqa: E402


class TestChecks(unittest.TestCase):
    def test_fast_checks_pass(self):
        names = ["dephasing-oracle", "critical-intervals", "critical-closed-form", "squeezing-trends",
                 "steady-state", "qsl", "structure", "determinism"]
        for result in validate.run_checks(names, fast=True):
            with self.subTest(check=result.name):
                self.assertTrue(result.ok, result.detail)

    def test_discord_oracle_fast(self):
        ok, detail = validate.check_discord_oracle(fast=True, scale=1.0)
        self.assertTrue(ok, detail)

    def test_stationary_amplification_fast(self):
        ok, detail = validate.check_amplification(fast=True, scale=1.0)
        self.assertTrue(ok, detail)
        self.assertIn("stationary R", detail)

    def test_tiny_scale_fails(self):
        with self.assertLogs("validate", level="WARNING"):
            (result,) = validate.run_checks(["dephasing-oracle"], fast=True, scale=1e-30)
        self.assertFalse(result.ok)

    def test_results_follow_requested_order(self):
        names = ["structure", "critical-intervals"]
        results = validate.run_checks(names, fast=True, mapper=OrderedPool(2).map)
        self.assertEqual([r.name for r in results], names)

    def test_unknown_check(self):
        with self.assertRaises(KeyError):
            validate.run_checks(["nope"])

    def test_random_params_are_physical(self):
        params = validate.random_params(np.random.default_rng(validate.SEED), 20)
        self.assertEqual(len(params), 20)


if __name__ == '__main__':
    unittest.main()
