"""
Console renderables for squeezelight runs: header, tables, panels and the
discord sparkline. Everything here returns rich objects; printing is the
caller's business.
"""

import math

from rich import box
from rich.align import Align
from rich.console import Group
from rich.panel import Panel
from rich.table import Table

SPARK_CHARS = " ▁▂▃▄▅▆▇█"


def header(version):
    title = "[bold white]SQUEEZELIGHT[/] [dim]v{}[/]".format(version)
    return Panel(Align.center(title), subtitle="Discord dynamics in a squeezed reservoir", style="bold cyan")


def generate_sparkline(data, width=60):
    """Text sparkline of a series, scaled between its min and max; nan shows as a gap."""
    values = [v for v in data if v is not None and not math.isnan(v)]
    if not values:
        return ""
    if len(data) > width:
        step = len(data) / width
        data = [data[int(i * step)] for i in range(width)]
    lo, hi = min(values), max(values)
    span = hi - lo
    out = []
    for v in data:
        if v is None or math.isnan(v):
            out.append(" ")
        elif span <= 0.0:
            out.append(SPARK_CHARS[4])
        else:
            out.append(SPARK_CHARS[1 + int((v - lo) / span * 7.999)])
    return "".join(out)


def _fmt(value, spec=".6g"):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return format(value, spec)


def trace_panel(params, bath, records, crit, steady, settle=None):
    q = [rec.discord for rec in records]
    grid = Table.grid(padding=(0, 2))
    grid.add_column(style="bold cyan", justify="right")
    grid.add_column(style="white")
    grid.add_row("State:", "c = ({:g}, {:g}, {:g})".format(*params.as_tuple()))
    grid.add_row("Bath:", "r = {:g}, theta = {:.4g}, beta = {}".format(
        bath.r, bath.theta, "inf" if bath.zero_temperature else _fmt(bath.beta)))
    grid.add_row("Transition:", crit.kind.value + ("" if crit.tau_c is None else f" at tau_c = {crit.tau_c:.6g}"))
    grid.add_row("Q(first):", _fmt(q[0]))
    grid.add_row("Q(last):", _fmt(q[-1]))
    grid.add_row("Q(steady):", _fmt(steady))
    grid.add_row("Settles by:", "not within horizon" if settle is None else f"tau = {settle:.6g}")
    spark = generate_sparkline(q)
    return Panel(
        Group(grid, Align.center(f"\n[cyan]{spark}[/cyan]")),
        title="[bold]Discord Trace[/bold]",
        border_style="green",
    )


def critical_table(rows):
    """rows: (c1, theta, r, CriticalTimeResult, closed-form tau_c or None)."""
    table = Table(title="Critical Times", box=box.ROUNDED)
    table.add_column("c1", justify="right")
    table.add_column("theta", justify="right")
    table.add_column("r", justify="right")
    table.add_column("kind", style="cyan")
    table.add_column("tau_c", justify="right", style="green")
    table.add_column("r=0 closed form", justify="right", style="dim")
    for c1, theta, r, crit, closed in rows:
        table.add_row(_fmt(c1), _fmt(theta, ".4g"), _fmt(r), crit.kind.value, _fmt(crit.tau_c), _fmt(closed))
    return table


def phase_panel(diagram):
    body = Table.grid(padding=(0, 2))
    body.add_column(style="bold cyan", justify="right")
    body.add_column()
    body.add_row("Grid:", f"{len(diagram.c1_values)} c1 x {len(diagram.tau_values)} tau")
    body.add_row("Masked rows:", str(diagram.masked))
    values = [v for row in diagram.discord for v in row if not math.isnan(v)]
    body.add_row("Q range:", f"[{_fmt(min(values))}, {_fmt(max(values))}]" if values else "-")
    return Panel(body, title="[bold]Phase Diagram[/bold]", border_style="magenta")


def amplification_table(curves, intersections, onset):
    """curves: label -> (c1 values, R values); intersections: label -> (c1*, R*) or None."""
    table = Table(title="Amplification Rate", box=box.ROUNDED)
    table.add_column("curve", style="cyan")
    table.add_column("R(c1)", style="green")
    table.add_column("max R", justify="right")
    for label, (_, rates) in curves.items():
        finite = [r for r in rates if not math.isnan(r)]
        table.add_row(label, generate_sparkline(list(rates), width=40), _fmt(max(finite) if finite else None))
    lines = []
    for label, point in intersections.items():
        where = "none in range" if point is None else f"(c1, R) = ({point[0]:.4f}, {point[1]:.4f})"
        lines.append(f"[bold]{label}[/bold]: {where}")
    lines.append(f"[bold]onset of amplification[/bold]: {'none in range' if onset is None else f'c1 = {onset:.4f}'}")
    return Group(table, Panel("\n".join(lines), title="[bold]Intersections[/bold]", border_style="yellow"))


def qsl_table(rows, analyses):
    """rows: (label, QslRecord); analyses: label -> SweepAnalysis."""
    table = Table(title="Quantum Speed Limit", box=box.ROUNDED)
    table.add_column("point", style="cyan")
    table.add_column("Theta", justify="right")
    table.add_column("Lambda_op", justify="right")
    table.add_column("tau_qsl", justify="right", style="green")
    table.add_column("stationary", justify="center")
    for label, rec in rows:
        table.add_row(label, _fmt(rec.theta_angle), _fmt(rec.lambda_op), _fmt(rec.tau_qsl),
                      "yes" if rec.stationary else "")
    notes = []
    for label, analysis in analyses.items():
        if analysis.flat:
            notes.append(f"[bold]{label}[/bold]: flat (spread {analysis.spread:.2e})")
        elif analysis.location is None:
            notes.append(f"[bold]{label}[/bold]: monotone, no interior extremum")
        else:
            notes.append(f"[bold]{label}[/bold]: {analysis.location:.4f} (spread {analysis.spread:.3e})")
    if not notes:
        return table
    return Group(table, Panel("\n".join(notes), title="[bold]Sweep Analysis[/bold]", border_style="yellow"))


def validation_table(results):
    """results: (name, ok, detail, seconds)."""
    table = Table(title="Validation", box=box.ROUNDED, expand=True)
    table.add_column("check", style="cyan")
    table.add_column("status")
    table.add_column("detail", style="dim")
    table.add_column("time", justify="right")
    for name, ok, detail, seconds in results:
        status = "[green]PASS[/green]" if ok else "[bold red]FAIL[/bold red]"
        table.add_row(name, status, detail, f"{seconds:.2f}s")
    return table
