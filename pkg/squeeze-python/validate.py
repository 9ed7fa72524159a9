"""
Oracle-equivalence and invariant checks behind `squeezelight validate`.

Each check returns (ok, detail). `scale` multiplies every tolerance, so a
scale far below 1 turns the suite into a test of the checks themselves.
"""

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

import bath
import correlations
import dynamics
import qsl
import states
from errors import SqueezeError
from runner import OrderedPool, format_value

log = logging.getLogger(__name__)

SEED = 20240521
QUARTER_PI = math.pi / 4.0
HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def zero_t_profile(r=0.0, theta=0.0, method=bath.Method.ANALYTIC_ZERO_T, rel_tol=bath.DEFAULT_REL_TOL):
    return bath.DephasingProfile(bath.SqueezedBathSpec(r=r, theta=theta), method, quad_rel_tol=rel_tol)


def random_params(rng, count):
    """Uniform samples from the physical tetrahedron of (c1, c2, c3)."""
    out = []
    while len(out) < count:
        c = rng.uniform(-1.0, 1.0, size=3)
        if states.XStateParams.is_physical(*c):
            out.append(states.XStateParams(*c))
    return out


# --- Checks ---

def check_dephasing_oracle(fast, scale):
    tol = 1e-8 * scale
    taus = (0.1, 1.0, 5.0) if fast else (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
    squeezes = [(0.5, HALF_PI)] if fast else [
        (r, t) for r in (0.25, 0.5, 1.0) for t in (0.0, QUARTER_PI, HALF_PI, math.pi)]
    worst = 0.0
    for r, theta in [(0.0, 0.0)] + squeezes:
        analytic = zero_t_profile(r, theta)
        quadrature = zero_t_profile(r, theta, bath.Method.QUADRATURE)
        for tau in taus:
            worst = max(worst, abs(quadrature.gamma(tau) - analytic.gamma(tau)))
    return worst <= tol, f"max |Gamma_quad - Gamma_closed| = {worst:.2e} (tol {tol:.0e})"


def check_discord_oracle(fast, scale):
    tol = 1e-6 * scale
    rng = np.random.default_rng(SEED)
    count, grid = (8, 60) if fast else (100, correlations.DEFAULT_GRID)
    cases = [(p, 1.0) for p in random_params(rng, count)]
    profile = zero_t_profile(0.5, HALF_PI)
    taus = np.linspace(0.0, 10.0, 4 if fast else 20)
    for family in ((0.5, 0.0, 0.3), (0.9, 0.6, -0.6)):
        p = states.XStateParams(*family)
        cases += [(p, profile.attenuation(t)) for t in taus]
    worst = 0.0
    for params, att in cases:
        alpha = params.corner * att
        closed = correlations.discord_closed(params, alpha).discord
        brute = correlations.discord_bruteforce(states.evolve(params, att), grid=grid)
        worst = max(worst, abs(closed - brute))
    return worst <= tol, f"{len(cases)} states, max |Q_closed - Q_brute| = {worst:.2e} (tol {tol:.0e})"


def check_critical_intervals(fast, scale):
    profile = zero_t_profile(0.5, HALF_PI)
    kinds = dynamics.TransitionKind
    failures = []
    expectations = [(0.3, 0.0, 0.3, kinds.NO_TRANSITION), (0.6, 0.0, 0.3, kinds.INFINITE)]
    expectations += [(c1, 0.0, 0.3, kinds.FINITE) for c1 in np.linspace(0.31, 0.59, 8)]
    expectations += [(c1, 0.6, -0.6, kinds.INFINITE) for c1 in np.linspace(0.61, 0.99, 8)]
    for c1, c2, c3, expected in expectations:
        got = dynamics.classify_critical_time(states.XStateParams(c1, c2, c3), profile).kind
        if got is not expected:
            failures.append(f"c=({c1:.3g},{c2},{c3}) gave {got.value}")
    return not failures, "; ".join(failures) or f"{len(expectations)} states classified as expected"


def check_critical_closed_form(fast, scale):
    tol = 1e-8 * scale
    residual_tol = 1e-9 * scale
    unsqueezed = zero_t_profile()
    worst, cases = 0.0, 0
    n = 4 if fast else 10
    for c3 in np.linspace(0.15, 0.45, n):
        for c1 in np.linspace(c3 + 0.01, min(2.0 * c3, 1.0 - c3) - 0.01, n):
            params = states.XStateParams(c1, 0.0, c3)
            result = dynamics.classify_critical_time(params, unsqueezed)
            if result.finite:
                cases += 1
                worst = max(worst, abs(result.tau_c - dynamics.critical_time_closed_form(params)))
    residual = 0.0
    params = states.XStateParams(0.5, 0.0, 0.3)
    for r in (0.1, 0.5, 1.0):
        for theta in (0.0, QUARTER_PI, HALF_PI):
            profile = zero_t_profile(r, theta)
            tau_c = dynamics.classify_critical_time(params, profile).tau_c
            residual = max(residual, abs(dynamics.crossing_residual(params, profile, tau_c)))
    ok = cases > 0 and worst <= tol and residual <= residual_tol
    return ok, f"{cases} roots, max deviation {worst:.2e}, max squeezed residual {residual:.2e}"


def check_squeezing_trends(fast, scale):
    params = states.XStateParams(0.5, 0.0, 0.3)
    tc = lambda r, t, p=params: dynamics.classify_critical_time(p, zero_t_profile(r, t)).tau_c
    by_theta = [tc(0.5, t) for t in (0.0, QUARTER_PI, HALF_PI)]
    by_r = [tc(r, HALF_PI) for r in (0.1, 0.5, 1.0)]
    by_c1 = [dynamics.classify_critical_time(states.XStateParams(c1, 0.0, 0.3), zero_t_profile(0.5, HALF_PI)).tau_c
             for c1 in np.linspace(0.32, 0.58, 8)]
    ok = (by_theta[0] < by_theta[1] < by_theta[2] and by_r[0] > by_r[1] > by_r[2]
          and all(a < b for a, b in zip(by_c1[:-1], by_c1[1:])))
    return ok, "tau_c(theta) = {}, tau_c(r) = {}".format(
        ", ".join(f"{v:.4f}" for v in by_theta), ", ".join(f"{v:.4f}" for v in by_r))


def check_steady_state(fast, scale):
    # on the Omega branch C is linear in alpha; the (0.9, 0.6, -0.6) tail at tau = 200 is ~2.5e-4 for r = 0
    ok, parts = True, []
    for family, tol in (((0.5, 0.0, 0.3), 1e-4), ((0.9, 0.6, -0.6), 1e-3)):
        params = states.XStateParams(*family)
        steady = dynamics.steady_state_discord(params)
        worst = 0.0
        for r in (0.0, 0.5, 1.0):
            for theta in (0.0, HALF_PI, math.pi):
                q = dynamics.discord_at(params, zero_t_profile(r, theta), dynamics.STEADY_STATE_TAU).discord
                worst = max(worst, abs(q - steady))
        ok = ok and worst <= tol * scale
        parts.append(f"c={family}: {worst:.2e} (tol {tol * scale:.0e})")
    return ok, "max |Q(200) - Q_steady|: " + "; ".join(parts)


def check_amplification(fast, scale):
    profile = zero_t_profile(0.5, 0.0)
    stationary = dynamics.amplification_rate(states.XStateParams(0.4, 0.4, 0.1), profile)
    detail = f"stationary R = {stationary:.12g}"
    ok = abs(stationary - 1.0) <= 1e-9 * scale
    if fast:
        return ok, detail
    rate = lambda r, theta: dynamics.rate_function(0.0, 0.3, zero_t_profile(r, theta))
    crossings = (
        ("theta", np.linspace(0.36, 0.5, 15), rate(0.5, 0.0), rate(0.5, HALF_PI), (0.421, 1.176)),
        ("r", np.linspace(0.38, 0.48, 11), rate(0.1, 0.0), rate(1.0, 0.0), (0.436, 1.219)),
    )
    for axis, c1s, first, last, (c1_ref, rate_ref) in crossings:
        point = dynamics.find_intersection(c1s, first, last)
        if point is None:
            return False, detail + f"; {axis} curves do not cross"
        ok = ok and abs(point[0] - c1_ref) <= 0.02 * scale and abs(point[1] - rate_ref) <= 0.05 * scale
        detail += f"; {axis}-curve crossing at ({point[0]:.4f}, {point[1]:.4f})"

    family_b = states.XStateParams(0.9, 0.6, -0.6)
    by_theta = [dynamics.amplification_rate(family_b, zero_t_profile(0.5, t)) for t in (0.0, HALF_PI / 2, HALF_PI)]
    by_r = np.diff([dynamics.amplification_rate(family_b, zero_t_profile(r, HALF_PI))
                    for r in np.linspace(0.0, 1.5, 7)])
    falls = by_theta[0] > by_theta[1] > by_theta[2]
    turns = bool(np.any(by_r > 0.0) and np.any(by_r < 0.0))
    ok = ok and falls and turns
    detail += f"; c=(0.9, 0.6, -0.6): R falls with theta {falls}, R turns with r {turns}"
    return ok, detail


def check_qsl(fast, scale):
    tol = 1e-8 * scale
    worst, bound_ok = 0.0, True
    for c1 in (0.1, 0.3, 0.5, 0.7):
        params = states.XStateParams(c1, 0.0, 0.3)
        for r, theta in ((0.0, 0.0), (0.5, HALF_PI), (1.0, 2.76)):
            profile = zero_t_profile(r, theta)
            for tau in ((1.0,) if fast else (0.5, 1.0, 3.0)):
                rec = qsl.qsl_time(params, profile, tau)
                bound_ok = bound_ok and rec.bound_holds()
                worst = max(worst, abs(rec.lambda_op - qsl.lambda_op_closed(params, profile, tau)))
    stationary = qsl.qsl_time(states.XStateParams(0.3, 0.3, 0.2), zero_t_profile(0.5, 0.0), 1.0)
    ok = bound_ok and worst <= tol and stationary.stationary and stationary.tau_qsl == 0.0
    return ok, f"tau_QSL <= tau: {bound_ok}; max Lambda_op deviation {worst:.2e}"


def check_structure(fast, scale):
    rng = np.random.default_rng(SEED + 1)
    worst_spectrum, worst_identity, worst_marginal = 0.0, 0.0, 0.0
    for params in random_params(rng, 10 if fast else 50):
        for att in (1.0, 0.5, 1e-3):
            rho = states.evolve(params, att)
            alpha = params.corner * att
            closed = np.sort(states.eigenvalues_closed(params, alpha).mu)
            worst_spectrum = max(worst_spectrum, float(np.max(np.abs(closed - np.sort(rho.eigenvalues())))))
            rec = correlations.discord_closed(params, alpha)
            worst_identity = max(worst_identity, abs(rec.mutual_info - rec.classical - rec.discord))
            for m in states.marginals(rho):
                worst_marginal = max(worst_marginal, float(np.max(np.abs(m - np.eye(2) / 2.0))))
    ok = worst_spectrum <= 1e-10 * scale and worst_identity <= 1e-12 * scale and worst_marginal <= 1e-12 * scale
    return ok, (f"spectrum {worst_spectrum:.1e}, I - C - Q {worst_identity:.1e}, "
                f"marginals {worst_marginal:.1e}")


def check_determinism(fast, scale):
    profile = zero_t_profile(0.5, HALF_PI)
    c1s = np.linspace(0.0, 0.8, 9 if fast else 41)
    taus = np.linspace(0.0, 10.0, 11 if fast else 51)

    def rows(workers):
        diagram = dynamics.phase_diagram(c1s, 0.0, 0.3, profile, taus, mapper=OrderedPool(workers).map)
        return [[format_value(v) for v in row] for row in diagram.discord]

    same = rows(1) == rows(4)
    return same, "1 worker and 4 workers agree" if same else "outputs differ between worker counts"


CHECKS = {
    "dephasing-oracle": check_dephasing_oracle,
    "discord-oracle": check_discord_oracle,
    "critical-intervals": check_critical_intervals,
    "critical-closed-form": check_critical_closed_form,
    "squeezing-trends": check_squeezing_trends,
    "steady-state": check_steady_state,
    "amplification": check_amplification,
    "qsl": check_qsl,
    "structure": check_structure,
    "determinism": check_determinism,
}


def run_checks(names=None, fast=False, scale=1.0, mapper=map):
    """Run the named checks (all by default); exceptions count as failures."""
    names = list(names or CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")

    def run(name):
        start = time.perf_counter()
        try:
            ok, detail = CHECKS[name](fast, scale)
        except SqueezeError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        if not ok:
            log.warning("validation check %s failed: %s", name, detail)
        return CheckResult(name, bool(ok), detail, time.perf_counter() - start)

    return list(mapper(run, names))
