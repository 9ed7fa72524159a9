#!/usr/bin/env python3
"""
squeezelight: discord dynamics of two qubits in a common squeezed reservoir.

    squeezelight trace    --c1 0.5 --c2 0 --c3 0.3 --r 0.5 --theta 1.5708
    squeezelight critical --c1-range 0.31 0.59 29 --thetas 0 0.785 1.571
    squeezelight phase | amplify | qsl  [scenario flags]
    squeezelight validate [--fast]
    squeezelight preset amplify-a

Artifacts go to --output (default $SQUEEZELIGHT_OUTPUT_DIR/<command>.csv) with a
sibling <output>.manifest.json. Exit codes: 0 success, 2 configuration error,
3 numerical failure, 4 I/O error.
"""

import argparse
import logging
import os
import sys

from rich.console import Console
from rich.logging import RichHandler

# Ensure local imports work
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import bath  # noqa: E402
import config  # noqa: E402
import dynamics  # noqa: E402
import presets  # noqa: E402
import qsl  # noqa: E402
import report  # noqa: E402
import runner  # noqa: E402
import states  # noqa: E402
import validate  # noqa: E402
from correlations import CSV_HEADER  # noqa: E402
from errors import EXIT_NUMERICAL, EXIT_OK, PhysicalityError, SqueezeError, exit_code_for  # noqa: E402

LOG_ENV = "SQUEEZELIGHT_LOG"

console = Console(stderr=True)
log = logging.getLogger("squeezelight")


def setup_logging(level=None):
    level = (level or os.environ.get(LOG_ENV) or "WARNING").upper()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


# --- Commands ---

MONOTONIC_POINTS = 200


def _check_dephasing(manifest, profile, taus):
    """Scan Gamma over the run's tau range; a decrease is logged and lands in the manifest."""
    tau_max = max(taus)
    if tau_max <= 0.0:
        return None
    return manifest.timed("monotonicity", bath.check_monotonic, profile, tau_max=tau_max, points=MONOTONIC_POINTS)


def cmd_trace(cfg, mapper, manifest, path, args):
    rows, dumps, summary = [], [], []
    taus = cfg.axis("tau")
    for theta, r, profile in cfg.profiles():
        request = dynamics.TraceRequest(cfg.state, profile, taus)
        _check_dephasing(manifest, profile, taus)
        records = manifest.timed("trace", dynamics.trace, request, mapper)
        rows += [(theta, r, *rec.csv_row()) for rec in records]
        crit = dynamics.classify_critical_time(cfg.state, profile)
        steady = dynamics.steady_state_discord(cfg.state)
        settle = manifest.timed("settle", dynamics.time_to_steady_state, cfg.state, profile)
        console.print(report.trace_panel(cfg.state, profile.bath, records, crit, steady, settle))
        summary.append({"theta": theta, "r": r, "kind": crit.kind.value, "tau_c": crit.tau_c,
                        "steady": steady, "time_to_steady": settle})
        if getattr(args, "dump_state", False):
            matrices = manifest.timed("states", dynamics.trace_states, request, mapper)
            dumps.append({"theta": theta, "r": r, "tau": list(request.tau_grid),
                          "states": [states.density_matrix_to_json(m) for m in matrices]})
    runner.write_records(path, cfg.output.format, ("theta", "r", *CSV_HEADER), rows)
    if path == config.STDOUT:
        return []
    extra = [runner.write_json(f"{path}.report.json", summary)]
    if dumps:
        extra.append(runner.write_json(f"{path}.states.json", dumps))
    return extra


def cmd_critical(cfg, mapper, manifest, path, args):
    cells = [(c1, theta, r, profile) for theta, r, profile in cfg.profiles() for c1 in cfg.axis("c1")]

    def solve(cell):
        c1, theta, r, profile = cell
        try:
            params = states.XStateParams(c1, cfg.state.c2, cfg.state.c3)
        except PhysicalityError as exc:
            log.warning("c1 = %g skipped: %s", c1, exc)
            return None
        crit = dynamics.classify_critical_time(params, profile)
        unsqueezed = r == 0.0 and profile.method is bath.Method.ANALYTIC_ZERO_T
        closed = dynamics.critical_time_closed_form(params) if unsqueezed and crit.finite else None
        return crit, closed

    results = list(manifest.timed("critical", mapper, solve, cells))
    rows, table_rows = [], []
    for (c1, theta, r, _), result in zip(cells, results):
        if result is None:
            rows.append((c1, theta, r, "unphysical", None, None, None))
            continue
        crit, closed = result
        rows.append((c1, theta, r, crit.kind.value, crit.tau_c, crit.k_target, closed))
        table_rows.append((c1, theta, r, crit, closed))
    console.print(report.critical_table(table_rows))
    header = ("c1", "theta", "r", "kind", "tau_c", "k_target", "tau_c_closed")
    runner.write_records(path, cfg.output.format, header, rows)
    return []


def cmd_phase(cfg, mapper, manifest, path, args):
    rows = []
    for theta, r, profile in cfg.profiles():
        _check_dephasing(manifest, profile, cfg.axis("tau"))
        diagram = manifest.timed("phase", dynamics.phase_diagram, cfg.axis("c1"), cfg.state.c2, cfg.state.c3,
                                 profile, cfg.axis("tau"), mapper)
        for c1, valid, q_row in zip(diagram.c1_values, diagram.valid, diagram.discord):
            for tau, q in zip(diagram.tau_values, q_row):
                rows.append((theta, r, c1, tau, q if valid else None, bool(valid)))
        console.print(report.phase_panel(diagram))
    runner.write_records(path, cfg.output.format, ("theta", "r", "c1", "tau", "Q", "valid"), rows)
    return []


def _intersections(cfg, points, c1s):
    """Crossings of the first and last curve along each swept axis."""
    rate = lambda profile: dynamics.rate_function(cfg.state.c2, cfg.state.c3, profile, cfg.horizon, cfg.convention)
    by_theta = [p for p in points if p[1] == cfg.bath.r]
    by_r = [p for p in points if p[0] == cfg.bath.theta]
    found = {}
    for axis, family in (("theta", by_theta), ("r", by_r)):
        if len(family) < 2 or len(c1s) < 2:
            continue
        (t0, r0, first), (t1, r1, last) = family[0], family[-1]
        label = f"{axis}: ({t0:.4g}, {r0:g}) vs ({t1:.4g}, {r1:g})"
        found[label] = dynamics.find_intersection(c1s, rate(first), rate(last))
    return found


def cmd_amplify(cfg, mapper, manifest, path, args):
    c1s = cfg.axis("c1")
    points = cfg.profiles()
    rows, curves = [], {}
    for theta, r, profile in points:
        rates = manifest.timed("amplify", dynamics.amplification_curve, c1s, cfg.state.c2, cfg.state.c3, profile,
                               cfg.horizon, cfg.convention, mapper)
        rows += [(theta, r, c1, rate) for c1, rate in zip(c1s, rates)]
        curves[f"theta={theta:.4g}, r={r:g}"] = (c1s, rates)
    intersections = manifest.timed("intersections", _intersections, cfg, points, c1s)
    onset = None
    if len(c1s) > 1:
        onset = manifest.timed("onset", dynamics.amplification_onset, c1s, cfg.state.c2, cfg.state.c3,
                               cfg.profile(), horizon=cfg.horizon, convention=cfg.convention)
    console.print(report.amplification_table(curves, intersections, onset))
    runner.write_records(path, cfg.output.format, ("theta", "r", "c1", "R"), rows)
    if path == config.STDOUT:
        return []
    summary = {
        "convention": cfg.convention.value,
        "intersections": {k: None if v is None else {"c1": v[0], "R": v[1]} for k, v in intersections.items()},
        "onset_c1": onset,
    }
    return [runner.write_json(f"{path}.report.json", summary)]


def cmd_qsl(cfg, mapper, manifest, path, args):
    base = cfg.profile()
    thetas, rs = list(cfg.axis("theta")), list(cfg.axis("r"))
    rows, shown, analyses = [], [], {}
    for c1 in cfg.axis("c1"):
        try:
            params = states.XStateParams(c1, cfg.state.c2, cfg.state.c3)
        except PhysicalityError as exc:
            log.warning("c1 = %g skipped: %s", c1, exc)
            continue
        # (theta mod 2 pi, r) -> (profile, record), in squeezing_points order
        done = {}
        _, records = manifest.timed("qsl", qsl.qsl_sweep, params, base, cfg.drive_time, thetas=thetas, mapper=mapper)
        for theta, rec in zip(thetas, records):
            point = base.with_bath(cfg.bath.with_squeezing(theta=theta))
            done.setdefault((theta % bath.TWO_PI, cfg.bath.r), (point, rec))
        missing = [r for r in rs if (cfg.bath.theta, r) not in done]
        if missing:
            _, records = manifest.timed("qsl", qsl.qsl_sweep, params, base, cfg.drive_time, rs=missing, mapper=mapper)
            for r, rec in zip(missing, records):
                done.setdefault((cfg.bath.theta, r), (base.with_bath(cfg.bath.with_squeezing(r=r)), rec))

        for profile, rec in done.values():
            rows.append(qsl.csv_row(params, profile, rec))
            shown.append((f"c1={c1:g} theta={profile.bath.theta:.4g} r={profile.bath.r:g}", rec))
        if len(thetas) >= 3:
            analyses[f"c1={c1:g} symmetry axis in theta"] = qsl.symmetry_axis(
                thetas, [done[(t % bath.TWO_PI, cfg.bath.r)][1].tau_qsl for t in thetas])
        if len(rs) >= 3:
            analyses[f"c1={c1:g} turning point in r"] = qsl.turning_point(
                rs, [done[(cfg.bath.theta, r)][1].tau_qsl for r in rs])
    console.print(report.qsl_table(shown if len(shown) <= 20 else [], analyses))
    runner.write_records(path, cfg.output.format, qsl.CSV_HEADER, rows)
    return []


COMMANDS = {
    "trace": cmd_trace,
    "critical": cmd_critical,
    "phase": cmd_phase,
    "amplify": cmd_amplify,
    "qsl": cmd_qsl,
}


def execute(command, cfg, args, stem=None):
    """Validate the output path, run one computing command and write its manifest."""
    path = config.ensure_output_path(config.output_path(cfg, stem or command))
    workers = cfg.workers or runner.default_workers()
    manifest = runner.RunManifest.for_config(stem or command, cfg, workers)
    collector = runner.ManifestWarnings(manifest)
    logging.getLogger().addHandler(collector)
    try:
        with runner.progress_bar(console) as progress:
            pool = runner.OrderedPool(workers, progress, description=f"[cyan]{command}[/cyan]")
            extra = COMMANDS[command](cfg, pool.map, manifest, path, args)
    finally:
        logging.getLogger().removeHandler(collector)
    for artifact in [path, *extra]:
        manifest.record_output(artifact)
    written = manifest.finish().write(path)
    if path != config.STDOUT:
        console.print(f"[bold green]Wrote[/] {path}" + (f" [dim]({written})[/dim]" if written else ""))
    return EXIT_OK


def cmd_validate(args):
    with runner.progress_bar(console) as progress:
        pool = runner.OrderedPool(args.workers or 1, progress, description="[cyan]validating[/cyan]")
        results = validate.run_checks(args.check, fast=args.fast, scale=args.tolerance_scale, mapper=pool.map)
    console.print(report.validation_table([(r.name, r.ok, r.detail, r.seconds) for r in results]))
    failed = [r.name for r in results if not r.ok]
    if failed:
        console.print(f"[bold red]FAILED:[/] {', '.join(failed)}")
        return EXIT_NUMERICAL
    console.print("[bold green]All checks passed.[/]")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="squeezelight", description="Discord dynamics in a squeezed reservoir")
    parser.add_argument("--log-level", help=f"logging level (default: ${LOG_ENV} or WARNING)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    helps = {
        "trace": "discord time series",
        "critical": "sudden-change classification and critical times",
        "phase": "Q over (c1, tau)",
        "amplify": "amplification rate over c1, intersections and onset",
        "qsl": "quantum speed limit time",
    }
    for name, text in helps.items():
        sub = config.add_config_arguments(subparsers.add_parser(name, help=text))
        if name == "trace":
            sub.add_argument("--dump-state", action="store_true", help="also write <output>.states.json")

    preset_parser = subparsers.add_parser("preset", help="run a named sweep preset")
    preset_parser.add_argument("name", choices=presets.preset_names())
    preset_parser.add_argument("--dump-state", action="store_true", help="trace presets: write states too")
    config.add_config_arguments(preset_parser)

    validate_parser = subparsers.add_parser("validate", help="oracle and invariant checks")
    validate_parser.add_argument("--fast", action="store_true", help="reduced sample sizes")
    validate_parser.add_argument("--tolerance-scale", type=float, default=1.0, help="multiply every tolerance")
    validate_parser.add_argument("--check", action="append", choices=sorted(validate.CHECKS),
                                 help="run only this check (repeatable)")
    validate_parser.add_argument("--workers", type=int, help="checks run in parallel (default 1)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    console.print(report.header(runner.VERSION))
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "preset":
            preset = presets.get_preset(args.name)
            console.print(f"[bold]Preset[/] {preset.name}: {preset.description}")
            cfg = config.resolve(args, base=preset.config)
            return execute(preset.command, cfg, args, stem=preset.name)
        return execute(args.command, config.resolve(args), args)
    except (SqueezeError, OSError) as exc:
        console.print(f"[bold red]ERROR:[/] {exc}")
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
