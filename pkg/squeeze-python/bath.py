"""
The Reservoir: dephasing factor of two qubits in a common squeezed bath.

Every public time argument is the scaled time tau = omega_c * t. With the
default omega_c = 1 scaled time and physical time coincide.

Two evaluation paths are provided:

* the closed form valid at zero temperature for the Ohmic density
  J(w) = w exp(-w / w_c) / 2,
* adaptive quadrature of the continuum integral, valid for any registered
  spectral density and any inverse temperature.

The quadrature engine (`adaptive_integral`) is shared with the dynamics and
qsl modules so that every integral in the package obeys the same tolerance
and failure rules.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from errors import ConfigError, DomainError, QuadratureError

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
ZERO_TEMPERATURE = math.inf

# Quadrature window and panelling, in units of omega_c.
UPPER_CUTOFF = 50.0
SMALL_FREQUENCY = 1e-8
PERIODS_PER_PANEL = 4
MAX_PANELS = 4000

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-14


# --- Spectral densities ---

class SpectralDensity:
    """
    Spectral density J(w) expressed in units of the cutoff, x = w / w_c.

    Subclasses implement `reduced(x)` = J(w_c x) / (w_c x), which must stay
    finite as x -> 0. The quadrature integrand only ever needs J / w.
    """
    name = "abstract"

    def __call__(self, x):
        return x * self.reduced(x)

    def reduced(self, x):
        raise NotImplementedError


class OhmicSpectralDensity(SpectralDensity):
    name = "ohmic"

    def reduced(self, x):
        return 0.5 * math.exp(-x)


_SPECTRAL_DENSITIES = {"ohmic": OhmicSpectralDensity()}


def register_spectral_density(name, density):
    """Extension hook: make a SpectralDensity selectable by name."""
    if not isinstance(density, SpectralDensity):
        raise ConfigError(f"spectral density '{name}' must subclass SpectralDensity")
    _SPECTRAL_DENSITIES[name] = density


def spectral_density(name):
    try:
        return _SPECTRAL_DENSITIES[name]
    except KeyError:
        known = ", ".join(sorted(_SPECTRAL_DENSITIES))
        raise ConfigError(f"unknown spectral density '{name}' (known: {known})") from None


def available_spectral_densities():
    return sorted(_SPECTRAL_DENSITIES)


# --- Bath and profile ---

@dataclass(frozen=True)
class SqueezedBathSpec:
    """
    Squeezed thermal reservoir.

    r        squeezing strength, r >= 0
    theta    squeezing phase in radians, normalized into [0, 2 pi)
    beta     inverse temperature; math.inf (or None) is zero temperature
    omega_c  cutoff frequency, > 0
    spectral name of a registered spectral density
    omega_0  qubit frequency; drops out in the interaction picture, carried only
    """
    r: float = 0.0
    theta: float = 0.0
    beta: float = ZERO_TEMPERATURE
    omega_c: float = 1.0
    spectral: str = "ohmic"
    omega_0: float = 1.0

    def __post_init__(self):
        r = float(self.r)
        if not math.isfinite(r) or r < 0.0:
            raise ConfigError(f"squeezing strength r must be finite and >= 0, got {self.r}")
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise ConfigError(f"squeezing phase theta must be finite, got {self.theta}")
        beta = ZERO_TEMPERATURE if self.beta is None else float(self.beta)
        if math.isnan(beta) or beta <= 0.0:
            raise ConfigError(f"inverse temperature beta must be > 0 or infinite, got {self.beta}")
        omega_c = float(self.omega_c)
        if not math.isfinite(omega_c) or omega_c <= 0.0:
            raise ConfigError(f"cutoff omega_c must be finite and > 0, got {self.omega_c}")
        spectral_density(self.spectral)

        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", theta % TWO_PI)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "omega_c", omega_c)
        object.__setattr__(self, "omega_0", float(self.omega_0))

    @property
    def zero_temperature(self):
        return math.isinf(self.beta)

    @property
    def scaled_beta(self):
        """beta * omega_c, the only temperature combination Gamma(tau) depends on."""
        return self.beta * self.omega_c

    def with_squeezing(self, r=None, theta=None):
        return SqueezedBathSpec(
            r=self.r if r is None else r,
            theta=self.theta if theta is None else theta,
            beta=self.beta,
            omega_c=self.omega_c,
            spectral=self.spectral,
            omega_0=self.omega_0,
        )

    def to_dict(self):
        return {
            "r": self.r,
            "theta": self.theta,
            "beta": None if self.zero_temperature else self.beta,
            "omega_c": self.omega_c,
            "spectral": self.spectral,
            "omega_0": self.omega_0,
        }


class Method(str, Enum):
    ANALYTIC_ZERO_T = "analytic"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class DephasingProfile:
    """A bath plus the recipe used to evaluate its dephasing factor."""
    bath: SqueezedBathSpec = field(default_factory=SqueezedBathSpec)
    method: Method = Method.ANALYTIC_ZERO_T
    quad_rel_tol: float = DEFAULT_REL_TOL
    quad_abs_tol: float = DEFAULT_ABS_TOL

    def __post_init__(self):
        try:
            method = Method(self.method)
        except ValueError:
            raise ConfigError(f"unknown dephasing method '{self.method}'") from None
        object.__setattr__(self, "method", method)
        if method is Method.ANALYTIC_ZERO_T:
            _require_analytic(self.bath)
        if not self.quad_rel_tol > 0.0 or not self.quad_abs_tol > 0.0:
            raise ConfigError("quadrature tolerances must be positive")

    @classmethod
    def for_bath(cls, bath, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
        """Closed form whenever it applies, quadrature otherwise."""
        analytic = bath.zero_temperature and bath.spectral == "ohmic"
        method = Method.ANALYTIC_ZERO_T if analytic else Method.QUADRATURE
        return cls(bath=bath, method=method, quad_rel_tol=rel_tol, quad_abs_tol=abs_tol)

    def with_bath(self, bath):
        method = self.method
        if method is Method.ANALYTIC_ZERO_T and not (bath.zero_temperature and bath.spectral == "ohmic"):
            method = Method.QUADRATURE
        return DephasingProfile(bath, method, self.quad_rel_tol, self.quad_abs_tol)

    def gamma(self, tau):
        return dephasing_factor(self, tau)

    def rate(self, tau):
        return gamma_rate(self, tau)

    def attenuation(self, tau):
        return attenuation(self, tau)


def _require_analytic(bath):
    if not bath.zero_temperature:
        raise ConfigError("the closed-form dephasing factor needs zero temperature (beta = inf)")
    if bath.spectral != "ohmic":
        raise ConfigError(f"the closed-form dephasing factor needs the Ohmic density, got '{bath.spectral}'")


def _check_tau(tau):
    tau = float(tau)
    if math.isnan(tau) or tau < 0.0:
        raise DomainError(f"time must be >= 0, got {tau}")
    return tau


# --- Closed form (zero temperature, Ohmic) ---

def _coefficients(tau):
    t2 = tau * tau
    a = math.log1p(t2)
    b = 0.5 * math.log1p(4.0 * t2) - a
    c = 2.0 * math.atan(tau) - math.atan(2.0 * tau)
    return a, b, c


def _coefficient_derivatives(tau):
    d1 = 1.0 + tau * tau
    d4 = 1.0 + 4.0 * tau * tau
    da = 2.0 * tau / d1
    db = 4.0 * tau / d4 - 2.0 * tau / d1
    dc = 2.0 / d1 - 2.0 / d4
    return da, db, dc


def _combine(bath, a, b, c):
    ch = math.cosh(2.0 * bath.r)
    sh = math.sinh(2.0 * bath.r)
    return (a * ch - sh * (b * math.cos(bath.theta) + c * math.sin(bath.theta))) / TWO_PI


def gamma_analytic_zero_t(bath, tau):
    """
    Closed-form Gamma(tau) = [A cosh 2r - sinh 2r (B cos theta + C sin theta)] / 2 pi
    with A = ln(1 + tau^2), B = ln(1 + 4 tau^2)/2 - A, C = 2 atan(tau) - atan(2 tau).
    """
    _require_analytic(bath)
    tau = _check_tau(tau)
    return _combine(bath, *_coefficients(tau))


# --- Quadrature ---

@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abserr: float
    evaluations: int
    panels: int = 1


def adaptive_integral(func, lower, upper, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL,
                      points=None, limit=200):
    """
    QUADPACK adaptive integration of func over [lower, upper].

    Break points strictly inside the interval are forwarded to quad. Raises
    QuadratureError carrying the achieved estimate when quad gives up.
    """
    inner = None
    if points:
        inner = sorted({float(p) for p in points if lower < p < upper}) or None
    value, abserr, info, *failure = integrate.quad(
        func, lower, upper,
        epsabs=abs_tol, epsrel=rel_tol, limit=limit, points=inner, full_output=1,
    )
    if failure:
        raise QuadratureError(
            f"quadrature on [{lower:g}, {upper:g}] did not converge: {failure[0]} "
            f"(estimate {value!r}, error estimate {abserr:.3e})",
            estimate=value, abserr=abserr,
        )
    return QuadratureResult(value=value, abserr=abserr, evaluations=int(info.get("neval", 0)))


def integrate_panels(func, edges, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Sum of adaptive integrals over consecutive panels [edges[i], edges[i+1]]."""
    panels = len(edges) - 1
    values, errors, evaluations = [], [], 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        part = adaptive_integral(func, lo, hi, rel_tol=rel_tol, abs_tol=abs_tol / panels)
        values.append(part.value)
        errors.append(part.abserr)
        evaluations += part.evaluations
    return QuadratureResult(math.fsum(values), math.fsum(errors), evaluations, panels)


def _panel_edges(tau, scaled_beta=ZERO_TEMPERATURE):
    # A few oscillation periods of cos(x tau) per panel keeps every quad call cheap.
    period = TWO_PI / tau
    panels = math.ceil(UPPER_CUTOFF / (PERIODS_PER_PANEL * period))
    panels = min(MAX_PANELS, max(1, panels))
    edges = np.linspace(0.0, UPPER_CUTOFF, panels + 1).tolist()
    if math.isinf(scaled_beta):
        return edges
    # coth(beta w_c x / 2) departs from 1 below x ~ 1/(beta w_c); split that scale out by decades.
    thermal = []
    x = 1.0 / scaled_beta
    while x < edges[1]:
        thermal.append(x)
        x *= 10.0
    return [0.0, *thermal, *edges[1:]]


def dephasing_integrand(bath, tau):
    """
    Integrand of Gamma(tau) over x = w / w_c:

        (2/pi) (J/w)(x) coth(beta w_c x / 2) (1 - cos x tau)/x [cosh 2r - sinh 2r cos(x tau - theta)]

    Below SMALL_FREQUENCY the integrand is replaced by its x -> 0 limit:
    0 at zero temperature, (2/pi) (J/w)(0) tau^2 / (beta w_c) [cosh 2r - sinh 2r cos theta] otherwise.
    """
    density = spectral_density(bath.spectral)
    ch = math.cosh(2.0 * bath.r)
    sh = math.sinh(2.0 * bath.r)
    theta = bath.theta
    zero_t = bath.zero_temperature
    b = bath.scaled_beta
    prefactor = 2.0 / math.pi

    if zero_t:
        limit = 0.0
    else:
        limit = prefactor * density.reduced(0.0) * tau * tau / b * (ch - sh * math.cos(theta))

    def integrand(x):
        if x < SMALL_FREQUENCY:
            return limit
        thermal = 1.0 if zero_t else 1.0 / math.tanh(0.5 * b * x)
        s = math.sin(0.5 * x * tau)
        one_minus_cos = 2.0 * s * s
        squeeze = ch - sh * math.cos(x * tau - theta)
        return prefactor * density.reduced(x) * thermal * one_minus_cos / x * squeeze

    return integrand


def gamma_quadrature_result(profile, tau):
    tau = _check_tau(tau)
    if tau == 0.0:
        return QuadratureResult(0.0, 0.0, 0, 0)
    integrand = dephasing_integrand(profile.bath, tau)
    edges = _panel_edges(tau, profile.bath.scaled_beta)
    result = integrate_panels(integrand, edges, profile.quad_rel_tol, profile.quad_abs_tol)
    log.debug("Gamma(%g) = %r over %d panels, %d evaluations", tau, result.value,
              result.panels, result.evaluations)
    return result


def gamma_quadrature(profile, tau):
    """Gamma(tau) by adaptive quadrature of the continuum integral; works for any bath."""
    return gamma_quadrature_result(profile, tau).value


# --- Dispatch ---

def dephasing_factor(profile, tau):
    if profile.method is Method.ANALYTIC_ZERO_T:
        return gamma_analytic_zero_t(profile.bath, tau)
    return gamma_quadrature(profile, tau)


def finite_difference_step(tau):
    return max(1e-5, 1e-4 * tau)


def gamma_rate(profile, tau):
    """
    Dephasing rate gamma = dGamma/dt, per unit physical time (omega_c dGamma/dtau).

    Closed-form derivative on the analytic path; second-order finite differences
    with step max(1e-5, 1e-4 tau) on the quadrature path (one-sided near tau = 0).
    """
    tau = _check_tau(tau)
    bath = profile.bath
    if profile.method is Method.ANALYTIC_ZERO_T:
        return bath.omega_c * _combine(bath, *_coefficient_derivatives(tau))
    if tau == 0.0:
        # The integrand's time derivative carries sin(w t), which vanishes at t = 0.
        return 0.0
    h = finite_difference_step(tau)
    g = lambda s: gamma_quadrature(profile, s)
    if tau >= h:
        slope = (g(tau + h) - g(tau - h)) / (2.0 * h)
    else:
        slope = (-3.0 * g(tau) + 4.0 * g(tau + h) - g(tau + 2.0 * h)) / (2.0 * h)
    return bath.omega_c * slope


def attenuation(profile, tau):
    """Coherence attenuation exp(-4 Gamma(tau)) of the two-qubit corner entries."""
    return math.exp(-4.0 * dephasing_factor(profile, tau))


# --- Diagnostics ---

@dataclass
class MonotonicityReport:
    ok: bool
    checked: int
    violations: list = field(default_factory=list)


def check_monotonic(profile, tau_max=50.0, points=1000, slack=1e-10):
    """
    Sample Gamma on a uniform grid and report every step where it decreases by more than `slack`.
    """
    taus = np.linspace(0.0, tau_max, points)
    values = [dephasing_factor(profile, t) for t in taus]
    violations = []
    for i in range(1, points):
        if values[i] < values[i - 1] - slack:
            violations.append((float(taus[i - 1]), float(taus[i]), values[i - 1], values[i]))
    if violations:
        log.warning("Gamma decreases at %d of %d grid steps for r=%g theta=%g",
                    len(violations), points - 1, profile.bath.r, profile.bath.theta)
    return MonotonicityReport(ok=not violations, checked=points, violations=violations)
