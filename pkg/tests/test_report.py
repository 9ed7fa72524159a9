import io
import math
import os
import sys
import unittest

import numpy as np
from rich.console import Console

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "squeeze-python"))

import dynamics  # noqa: E402
import qsl  # noqa: E402
import report  # noqa: E402
from bath import DephasingProfile, SqueezedBathSpec  # noqa: E402
from states import XStateParams  # noqa: E402


def render(renderable):
    console = Console(file=io.StringIO(), width=120, record=True)
    console.print(renderable)
    return console.export_text()


class TestSparkline(unittest.TestCase):
    def test_scaling(self):
        line = report.generate_sparkline([0.0, 0.5, 1.0])
        self.assertEqual(len(line), 3)
        self.assertEqual(line[0], report.SPARK_CHARS[1])
        self.assertEqual(line[-1], report.SPARK_CHARS[8])

    def test_flat_and_gaps(self):
        self.assertEqual(report.generate_sparkline([2.0, 2.0]), report.SPARK_CHARS[4] * 2)
        self.assertEqual(report.generate_sparkline([1.0, math.nan, 2.0])[1], " ")
        self.assertEqual(report.generate_sparkline([]), "")
        self.assertEqual(report.generate_sparkline([math.nan]), "")

    def test_downsampling(self):
        self.assertEqual(len(report.generate_sparkline(list(range(500)), width=60)), 60)


class TestPanels(unittest.TestCase):
    def setUp(self):
        self.params = XStateParams(0.5, 0.0, 0.3)
        self.profile = DephasingProfile(SqueezedBathSpec(r=0.5, theta=1.0))

    def test_trace_panel(self):
        request = dynamics.TraceRequest(self.params, self.profile, (0.0, 1.0, 5.0))
        records = dynamics.trace(request)
        crit = dynamics.classify_critical_time(self.params, self.profile)
        text = render(report.trace_panel(self.params, self.profile.bath, records, crit, 0.1))
        self.assertIn("Discord Trace", text)
        self.assertIn("finite at tau_c", text)
        self.assertIn("not within horizon", text)
        settled = render(report.trace_panel(self.params, self.profile.bath, records, crit, 0.1, 12.5))
        self.assertIn("tau = 12.5", settled)

    def test_phase_panel(self):
        diagram = dynamics.phase_diagram([0.1, 0.5], 0.0, 0.3, self.profile, [0.0, 1.0])
        text = render(report.phase_panel(diagram))
        self.assertIn("2 c1 x 2 tau", text)

    def test_amplification_table(self):
        curves = {"theta=0": ([0.4, 0.5], np.array([1.1, math.nan]))}
        text = render(report.amplification_table(curves, {"theta": None}, 0.366))
        self.assertIn("none in range", text)
        self.assertIn("c1 = 0.3660", text)

    def test_qsl_table(self):
        rec = qsl.qsl_time(self.params, self.profile, 1.0)
        analyses = {"flat": qsl.SweepAnalysis(None, 0.0), "peak": qsl.SweepAnalysis(0.18, 0.2),
                    "monotone": qsl.SweepAnalysis(None, 0.5)}
        text = render(report.qsl_table([("c1=0.5", rec)], analyses))
        self.assertIn("flat (spread", text)
        self.assertIn("0.1800", text)
        self.assertIn("no interior extremum", text)

    def test_validation_table(self):
        table = report.validation_table([("structure", True, "ok", 0.1), ("qsl", False, "bad", 0.2)])
        self.assertEqual(table.row_count, 2)
        text = render(table)
        self.assertIn("PASS", text)
        self.assertIn("FAIL", text)


if __name__ == '__main__':
    unittest.main()
