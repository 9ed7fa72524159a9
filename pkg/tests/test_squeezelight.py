import csv
import io
import json
import os
import sys
import tempfile
import unittest
from unittest.mock import patch

from rich.console import Console

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "squeeze-python"))

import bath  # noqa: E402
import config  # noqa: E402
import presets  # noqa: E402
import squeezelight  # noqa: E402
from errors import ConfigError, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK  # noqa: E402


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        quiet = patch.object(squeezelight, "console", Console(file=io.StringIO()))
        quiet.start()
        self.addCleanup(quiet.stop)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def run_cli(self, *argv):
        return squeezelight.main(list(argv))


class TestTrace(CliTestCase):
    def test_writes_csv_and_manifest(self):
        out = self.path("trace.csv")
        code = self.run_cli("trace", "--r", "0.5", "--theta", "1.5707963267948966",
                            "--tau", "0", "2", "3", "--output", out, "--workers", "1")
        self.assertEqual(code, EXIT_OK)
        rows = read_rows(out)
        self.assertEqual(rows[0], ["theta", "r", "tau", "gamma", "alpha", "I", "C", "chi", "Q"])
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[1][2], "0.0")
        with open(out + ".manifest.json") as f:
            manifest = json.load(f)
        cfg = config.parse_config(manifest["config"])
        self.assertEqual(manifest["config_hash"], config.config_hash(cfg))
        self.assertEqual(manifest["command"], "trace")
        self.assertIn(out, manifest["outputs"])

    def test_dump_state(self):
        out = self.path("trace.csv")
        self.assertEqual(self.run_cli("trace", "--tau", "0", "1", "2", "--output", out, "--dump-state"), EXIT_OK)
        with open(out + ".states.json") as f:
            dump = json.load(f)
        self.assertEqual(len(dump), 1)
        self.assertEqual(len(dump[0]["states"]), 2)
        self.assertEqual(len(dump[0]["states"][0]), 4)

    def test_json_format(self):
        out = self.path("trace.json")
        self.assertEqual(self.run_cli("trace", "--tau", "0", "1", "2", "--output", out, "--format", "json"), EXIT_OK)
        with open(out) as f:
            records = json.load(f)
        self.assertEqual(records[0]["tau"], 0.0)
        self.assertEqual(records[0]["gamma"], 0.0)

    def test_summary_reports_settle_time(self):
        out = self.path("trace.csv")
        self.assertEqual(self.run_cli("trace", "--c1", "0.4", "--c2", "0.4", "--c3", "0.1",
                                      "--tau", "0", "1", "2", "--output", out), EXIT_OK)
        with open(out + ".report.json") as f:
            summary = json.load(f)
        self.assertEqual(len(summary), 1)
        self.assertEqual(summary[0]["time_to_steady"], 0.0)
        self.assertIn(summary[0]["kind"], {"finite", "infinite", "no-transition"})

    def test_decreasing_gamma_lands_in_manifest(self):
        def flag(profile, **kwargs):
            bath.log.warning("Gamma decreases at 1 of %d grid steps for r=%g theta=%g",
                             kwargs["points"] - 1, profile.bath.r, profile.bath.theta)
            return bath.MonotonicityReport(ok=False, checked=kwargs["points"])

        for command, extra in (("trace", ()), ("phase", ("--c1-range", "0.2", "0.4", "2"))):
            out = self.path(f"{command}.csv")
            with self.subTest(command=command), patch.object(squeezelight.bath, "check_monotonic",
                                                             side_effect=flag) as check:
                self.assertEqual(self.run_cli(command, "--tau", "0", "2", "3", *extra, "--output", out), EXIT_OK)
                self.assertEqual(check.call_args.kwargs["tau_max"], 2.0)
                with open(out + ".manifest.json") as f:
                    warnings = json.load(f)["warnings"]
                self.assertTrue(any("Gamma decreases" in w for w in warnings))

    def test_stdout_artifact(self):
        with patch("sys.stdout", new_callable=io.StringIO) as stdout, patch("sys.stderr", new_callable=io.StringIO):
            self.assertEqual(self.run_cli("trace", "--tau", "0", "1", "2", "--output", "-"), EXIT_OK)
        self.assertTrue(stdout.getvalue().startswith("theta,r,tau,"))


class TestExitCodes(CliTestCase):
    def test_unphysical_state(self):
        self.assertEqual(self.run_cli("trace", "--c1", "0.9", "--output", self.path("x.csv")), EXIT_CONFIG)

    def test_bad_config_file(self):
        scenario = self.path("scenario.json")
        with open(scenario, "w") as f:
            json.dump({"bath": {"temperature": 1.0}}, f)
        self.assertEqual(self.run_cli("trace", "--config", scenario, "--output", self.path("x.csv")), EXIT_CONFIG)

    def test_config_file_not_an_object(self):
        for payload in ([1, 2], "x"):
            scenario = self.path("scenario.json")
            with open(scenario, "w") as f:
                json.dump(payload, f)
            with self.subTest(payload=payload):
                self.assertEqual(self.run_cli("trace", "--config", scenario, "--output", self.path("x.csv")),
                                 EXIT_CONFIG)

    def test_missing_config_file(self):
        self.assertEqual(self.run_cli("trace", "--config", self.path("missing.json")), EXIT_IO)

    def test_output_is_directory(self):
        self.assertEqual(self.run_cli("trace", "--tau", "0", "1", "2", "--output", self.tmp.name), EXIT_IO)

    def test_validate(self):
        self.assertEqual(self.run_cli("validate", "--fast", "--check", "structure"), EXIT_OK)
        code = self.run_cli("validate", "--fast", "--check", "dephasing-oracle", "--tolerance-scale", "1e-30")
        self.assertEqual(code, EXIT_NUMERICAL)


class TestCommands(CliTestCase):
    def test_phase_is_independent_of_worker_count(self):
        outputs = []
        for workers in ("1", "4"):
            out = self.path(f"phase-{workers}.csv")
            code = self.run_cli("phase", "--c1-range", "0", "0.8", "9", "--tau", "0", "5", "6",
                                "--r", "0.5", "--theta", "1.0", "--output", out, "--workers", workers)
            self.assertEqual(code, EXIT_OK)
            with open(out, "rb") as f:
                outputs.append(f.read())
        self.assertEqual(outputs[0], outputs[1])
        rows = read_rows(self.path("phase-1.csv"))
        self.assertEqual(len(rows), 1 + 9 * 6)
        masked = [row for row in rows[1:] if row[5] == "false"]
        self.assertEqual(len(masked), 6)
        self.assertTrue(all(row[4] == "" for row in masked))

    def test_critical_marks_unphysical(self):
        out = self.path("critical.csv")
        self.assertEqual(self.run_cli("critical", "--c1-range", "0.5", "0.9", "2", "--output", out), EXIT_OK)
        rows = read_rows(out)
        self.assertEqual([row[3] for row in rows[1:]], ["finite", "unphysical"])
        self.assertAlmostEqual(float(rows[1][4]), float(rows[1][6]), places=8)
        with open(out + ".manifest.json") as f:
            warnings = json.load(f)["warnings"]
        self.assertTrue(any("skipped" in w for w in warnings))

    def test_amplify_stationary_plain_integral(self):
        out = self.path("amplify.csv")
        code = self.run_cli("amplify", "--c1", "0.4", "--c2", "0.4", "--c3", "0.1", "--c1-range", "0.4", "0.4", "1",
                            "--convention", "plain-integral", "--horizon", "2", "--output", out)
        self.assertEqual(code, EXIT_OK)
        rows = read_rows(out)
        self.assertAlmostEqual(float(rows[1][3]), 2.0, places=8)
        with open(out + ".report.json") as f:
            summary = json.load(f)
        self.assertEqual(summary["convention"], "plain-integral")
        self.assertIsNone(summary["onset_c1"])

    def test_qsl(self):
        out = self.path("qsl.csv")
        code = self.run_cli("qsl", "--c1-range", "0.5", "0.5", "1", "--r", "0.5", "--thetas", "0", "1", "2",
                            "--drive-time", "2", "--output", out)
        self.assertEqual(code, EXIT_OK)
        rows = read_rows(out)
        self.assertEqual(rows[0], list(("c1", "r", "theta", "tau", "Theta", "Lambda_op", "tau_qsl")))
        self.assertEqual(len(rows), 4)
        for row in rows[1:]:
            self.assertAlmostEqual(float(row[6]), 0.5, places=7)

    def test_qsl_sweeps_theta_then_missing_r(self):
        out = self.path("qsl.csv")
        original = squeezelight.qsl.qsl_sweep
        with patch.object(squeezelight.qsl, "qsl_sweep", wraps=original) as sweep:
            code = self.run_cli("qsl", "--c1-range", "0.5", "0.5", "1", "--r", "0.5", "--theta", "1.0",
                                "--thetas", "0", "1", "--rs", "0.1", "0.5", "--output", out)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(sweep.call_count, 2)
        self.assertEqual(sweep.call_args_list[0].kwargs["thetas"], [0.0, 1.0])
        self.assertEqual(sweep.call_args_list[1].kwargs["rs"], [0.1])
        rows = read_rows(out)
        self.assertEqual([(row[1], row[2]) for row in rows[1:]], [("0.5", "0.0"), ("0.5", "1.0"), ("0.1", "1.0")])


class TestPresets(CliTestCase):
    def test_presets_parse(self):
        for name, preset in presets.PRESETS.items():
            with self.subTest(preset=name):
                cfg = config.parse_config(preset.config)
                self.assertIn(preset.command, squeezelight.COMMANDS)
                self.assertGreaterEqual(len(cfg.squeezing_points()), 1)

    def test_shipped_preset_files(self):
        root = os.path.join(os.path.dirname(__file__), "..", "presets")
        with open(os.path.join(root, "index.json")) as f:
            self.assertEqual(sorted(json.load(f)), sorted(presets.PRESETS))
        for name, preset in presets.PRESETS.items():
            with self.subTest(preset=name), open(os.path.join(root, f"{name}.json")) as f:
                self.assertEqual(json.load(f), preset.config)

    def test_alternate_names(self):
        for alias, target in presets.ALIASES.items():
            with self.subTest(alias=alias):
                self.assertIs(presets.get_preset(alias), presets.PRESETS[target])
        self.assertIn("fig5", presets.preset_names())
        out = self.path("alias.csv")
        self.assertEqual(self.run_cli("preset", "fig5", "--tau", "0", "1", "2", "--thetas", "0",
                                      "--rs", "0.5", "--output", out), EXIT_OK)
        with open(out + ".manifest.json") as f:
            self.assertEqual(json.load(f)["command"], "traces-b")

    def test_unknown_preset(self):
        with self.assertRaisesRegex(ConfigError, "no-such-preset"):
            presets.get_preset("no-such-preset")

    def test_run_preset_with_override(self):
        out = self.path("traces.csv")
        self.assertEqual(self.run_cli("preset", "traces-theta", "--tau", "0", "1", "3", "--output", out), EXIT_OK)
        rows = read_rows(out)
        self.assertEqual(len(rows), 1 + 3 * 3)
        self.assertEqual(sorted({row[0] for row in rows[1:]}), ["0.0", "0.7853981633974483", "1.5707963267948966"])
        with open(out + ".manifest.json") as f:
            self.assertEqual(json.load(f)["command"], "traces-theta")

    def test_preset_matches_config_file(self):
        scenario = self.path("critical-times.json")
        with open(scenario, "w") as f:
            json.dump(presets.get_preset("critical-times").config, f)
        via_preset, via_file = self.path("a.csv"), self.path("b.csv")
        self.assertEqual(self.run_cli("preset", "critical-times", "--c1-range", "0.35", "0.55", "3",
                                      "--output", via_preset), EXIT_OK)
        self.assertEqual(self.run_cli("critical", "--config", scenario, "--c1-range", "0.35", "0.55", "3",
                                      "--output", via_file), EXIT_OK)
        with open(via_preset, "rb") as a, open(via_file, "rb") as b:
            self.assertEqual(a.read(), b.read())


if __name__ == '__main__':
    unittest.main()
