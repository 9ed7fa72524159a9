"""
Time evolution of discord under the squeezed bath.

Sudden-change classification and critical-time solving, discord traces,
the steady state, amplification rates, phase diagrams and the curve
analysis (intersections, onsets) used by the sweep presets.

Functions that sweep independent cells take a `mapper` argument with the
signature of the builtin `map`; runner.OrderedPool.map plugs in parallelism
without changing the order of the results.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize

import bath
import correlations
import states
from errors import ConfigError, CriticalTimeError, DomainError, PhysicalityError, UndefinedRateError

log = logging.getLogger(__name__)

ROOT_XTOL = 1e-12
MAX_BRACKET = 1e8
STEADY_STATE_TAU = 200.0
DEFAULT_HORIZON = 3.0
RATE_REL_TOL = 1e-8
RATE_ABS_TOL = 1e-14
UNDEFINED_DISCORD = 1e-12
ONSET_THRESHOLD = 1e-3


class TransitionKind(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    NO_TRANSITION = "no-transition"


class Convention(str, Enum):
    TIME_AVERAGE = "time-average"
    PLAIN_INTEGRAL = "plain-integral"


@dataclass(frozen=True)
class CriticalTimeResult:
    kind: TransitionKind
    tau_c: float = None
    k_target: float = None

    @property
    def finite(self):
        return self.kind is TransitionKind.FINITE

    def to_dict(self):
        return {"kind": self.kind.value, "tau_c": self.tau_c, "k_target": self.k_target}


@dataclass(frozen=True)
class TraceRequest:
    params: states.XStateParams
    profile: bath.DephasingProfile
    tau_grid: tuple

    def __post_init__(self):
        grid = tuple(float(t) for t in self.tau_grid)
        if not grid:
            raise ConfigError("tau grid is empty")
        if grid[0] < 0.0 or not all(math.isfinite(t) for t in grid):
            raise ConfigError(f"tau grid must be finite and start at >= 0, got {grid[0]!r}")
        if any(b <= a for a, b in zip(grid[:-1], grid[1:])):
            raise ConfigError("tau grid must be strictly increasing")
        object.__setattr__(self, "tau_grid", grid)


@dataclass
class PhaseDiagram:
    c1_values: np.ndarray
    tau_values: np.ndarray
    discord: np.ndarray  # shape (len(c1), len(tau)); nan where masked
    valid: np.ndarray  # per-c1 mask

    @property
    def masked(self):
        return int(np.count_nonzero(~self.valid))


# --- Critical time ---

def omega_limits(params):
    """(Omega(0), Omega(inf)) of the chi = max(|c3|, Omega) competition."""
    inner = abs(params.inner)
    return (abs(params.corner) + inner) / 2.0, inner / 2.0


def k_target(params):
    """Attenuation at which the two branches of chi meet; None for stationary states."""
    if params.corner == 0.0:
        return None
    return (2.0 * abs(params.c3) - abs(params.inner)) / abs(params.corner)


def _crossing(params, profile):
    level = 2.0 * abs(params.c3) - abs(params.inner)
    corner = abs(params.corner)
    return lambda tau: corner * profile.attenuation(tau) - level


def classify_critical_time(params, profile):
    omega_0, omega_inf = omega_limits(params)
    c3 = abs(params.c3)
    k = k_target(params)
    if omega_0 <= c3:
        return CriticalTimeResult(TransitionKind.NO_TRANSITION, k_target=k)
    if omega_inf >= c3:
        return CriticalTimeResult(TransitionKind.INFINITE, k_target=k)

    f = _crossing(params, profile)
    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > MAX_BRACKET:
            raise CriticalTimeError(
                f"no sign change of the crossing condition below tau = {MAX_BRACKET:g}",
                diagnostics={"params": params.as_tuple(), "k_target": k, "last_value": f(lo)},
            )
    log.debug("critical-time bracket [%g, %g] for %s", lo, hi, params.as_tuple())
    try:
        tau_c = optimize.brentq(f, lo, hi, xtol=ROOT_XTOL, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise CriticalTimeError(
            f"critical-time root finding failed: {exc}",
            diagnostics={"params": params.as_tuple(), "bracket": (lo, hi), "k_target": k},
        ) from exc
    return CriticalTimeResult(TransitionKind.FINITE, tau_c=tau_c, k_target=k)


def critical_time_closed_form(params):
    """
    tau_c = sqrt(k^(-pi/2) - 1) for the unsqueezed zero-temperature Ohmic bath,
    where exp(-4 Gamma) = (1 + tau^2)^(-2/pi). None unless 0 < k < 1.
    """
    k = k_target(params)
    if k is None or not 0.0 < k < 1.0:
        return None
    return math.sqrt(k ** (-math.pi / 2.0) - 1.0)


def crossing_residual(params, profile, tau):
    """|alpha(tau)| + |c1 + c2| - 2 |c3|; zero at a finite critical time."""
    alpha = params.corner * profile.attenuation(tau)
    return abs(alpha) + abs(params.inner) - 2.0 * abs(params.c3)


def classical_correlation_piecewise(params, alpha, tau, crit):
    """
    C from the sudden-change picture: the Omega branch before tau_c, the
    constant |c3| branch from tau_c on.
    """
    if crit.kind is TransitionKind.NO_TRANSITION:
        x = abs(params.c3)
    elif crit.kind is TransitionKind.FINITE and tau >= crit.tau_c:
        x = abs(params.c3)
    else:
        x = (abs(alpha) + abs(params.inner)) / 2.0
    return correlations.classical_correlation_closed(x)


# --- Traces ---

def discord_at(params, profile, tau):
    gamma = profile.gamma(tau)
    alpha = params.corner * math.exp(-4.0 * gamma)
    return correlations.discord_closed(params, alpha, tau=tau, gamma=gamma)


def trace(request, mapper=map):
    """CorrelationRecords in grid order."""
    params, profile = request.params, request.profile
    return list(mapper(lambda tau: discord_at(params, profile, tau), request.tau_grid))


def trace_states(request, mapper=map):
    """Evolved density matrices on the request grid."""
    params, profile = request.params, request.profile
    return list(mapper(lambda tau: states.evolve(params, profile.attenuation(tau)), request.tau_grid))


def steady_state_discord(params):
    return correlations.discord_closed(params, 0.0).discord


def time_to_steady_state(params, profile, tol=1e-4, tau_max=STEADY_STATE_TAU, samples=400):
    """
    First tau after which |Q(tau) - Q(inf)| stays within tol on a geometric
    sample grid, refined by root finding. None if not reached by tau_max.
    """
    q_inf = steady_state_discord(params)
    deviation = lambda tau: abs(discord_at(params, profile, tau).discord - q_inf) - tol
    taus = np.concatenate(([0.0], np.geomspace(1e-3, tau_max, samples)))
    above = [i for i, t in enumerate(taus) if deviation(t) > 0.0]
    if not above:
        return 0.0
    last = above[-1]
    if last == len(taus) - 1:
        return None
    return optimize.brentq(deviation, taus[last], taus[last + 1], xtol=1e-10)


# --- Amplification ---

def amplification_rate(params, profile, horizon=DEFAULT_HORIZON, convention=Convention.TIME_AVERAGE):
    """
    R = [(1/horizon) int_0^horizon Q dtau] / Q(0) under the time-average
    convention, without the 1/horizon factor under the plain-integral one.
    """
    horizon = float(horizon)
    if not horizon > 0.0:
        raise DomainError(f"horizon must be > 0, got {horizon!r}")
    convention = Convention(convention)
    q0 = correlations.discord_closed(params, params.corner).discord
    if q0 <= UNDEFINED_DISCORD:
        raise UndefinedRateError(f"amplification rate undefined: initial discord {q0:.3e} <= {UNDEFINED_DISCORD}")

    crit = classify_critical_time(params, profile)
    kinks = [crit.tau_c] if crit.finite else None
    integral = bath.adaptive_integral(
        lambda tau: discord_at(params, profile, tau).discord,
        0.0, horizon, rel_tol=RATE_REL_TOL, abs_tol=RATE_ABS_TOL, points=kinks,
    )
    total = integral.value
    if convention is Convention.TIME_AVERAGE:
        total /= horizon
    return total / q0


def _rate_or_nan(c1, c2, c3, profile, horizon, convention):
    try:
        params = states.XStateParams(c1, c2, c3)
        return amplification_rate(params, profile, horizon, convention)
    except (PhysicalityError, UndefinedRateError) as exc:
        log.debug("R(c1=%g) skipped: %s", c1, exc)
        return math.nan


def rate_function(c2, c3, profile, horizon=DEFAULT_HORIZON, convention=Convention.TIME_AVERAGE):
    """c1 -> R at fixed (c2, c3), nan where undefined; the form find_intersection consumes."""
    return lambda c1: _rate_or_nan(float(c1), c2, c3, profile, horizon, convention)


def amplification_curve(c1_values, c2, c3, profile, horizon=DEFAULT_HORIZON,
                        convention=Convention.TIME_AVERAGE, mapper=map):
    """R over c1 at fixed (c2, c3); nan where the state is unphysical or has no discord."""
    rates = mapper(rate_function(c2, c3, profile, horizon, convention), c1_values)
    return np.array(list(rates), dtype=float)


def find_intersection(xs, f, g, xtol=1e-10):
    """
    First crossing of two curves: scan f - g on xs for a sign change, then
    bisect with Brent's method. Returns (x*, f(x*)) or None.
    """
    diff = lambda x: f(x) - g(x)
    previous_x, previous = None, None
    for x in xs:
        value = diff(x)
        if math.isnan(value):
            previous_x, previous = None, None
            continue
        if value == 0.0:
            return float(x), f(x)
        if previous is not None and (previous < 0.0) != (value < 0.0):
            root = optimize.brentq(diff, previous_x, x, xtol=xtol)
            return root, f(root)
        previous_x, previous = x, value
    return None


def amplification_onset(c1_values, c2, c3, profile, threshold=ONSET_THRESHOLD,
                        horizon=DEFAULT_HORIZON, convention=Convention.TIME_AVERAGE):
    """Smallest c1 with R > 1 + threshold, refined between the bracketing grid points."""
    level = 1.0 + threshold
    rate = rate_function(c2, c3, profile, horizon, convention)
    excess = lambda c1: rate(c1) - level
    previous = None
    for c1 in c1_values:
        value = excess(float(c1))
        if math.isnan(value):
            continue
        if value > 0.0:
            if previous is None:
                return float(c1)
            return optimize.brentq(excess, previous, float(c1), xtol=1e-8)
        previous = float(c1)
    return None


# --- Phase diagram ---

def phase_diagram(c1_values, c2, c3, profile, tau_values, mapper=map):
    """Q(c1, tau) over a rectangular grid; unphysical c1 rows are masked, not fatal."""
    c1_values = np.asarray(c1_values, dtype=float)
    tau_values = np.asarray(tau_values, dtype=float)
    attenuations = np.array([profile.attenuation(t) for t in tau_values])
    gammas = -np.log(attenuations) / 4.0

    def row(c1):
        try:
            params = states.XStateParams(c1, c2, c3)
        except PhysicalityError:
            return None
        return [correlations.discord_closed(params, params.corner * a, tau=t, gamma=g).discord
                for t, a, g in zip(tau_values, attenuations, gammas)]

    rows = list(mapper(row, c1_values))
    valid = np.array([r is not None for r in rows], dtype=bool)
    if not valid.any():
        raise ConfigError(f"no physical state for c1 in [{c1_values.min():g}, {c1_values.max():g}] "
                          f"with c2 = {c2:g}, c3 = {c3:g}")
    discord = np.full((len(c1_values), len(tau_values)), np.nan)
    for i, r in enumerate(rows):
        if r is not None:
            discord[i] = r
    result = PhaseDiagram(c1_values, tau_values, discord, valid)
    if result.masked:
        log.warning("phase diagram: %d of %d c1 rows are unphysical and masked", result.masked, len(c1_values))
    return result
