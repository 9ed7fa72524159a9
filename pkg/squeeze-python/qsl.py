"""
Quantum speed limit of the dephasing two-qubit evolution.

The bound uses the relative-purity angle between the initial and the evolved
state and the time-averaged operator norm of the dephasing generator:

    tau_QSL = sin^2(Theta) Tr[rho_0^2] / Lambda_op

Drive times and tau_QSL are scaled times (omega_c t); Lambda_op is per unit of
scaled time. The Liouvillian itself is returned per unit of physical time.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

import bath
import states
from errors import DomainError

log = logging.getLogger(__name__)

CSV_HEADER = ("c1", "r", "theta", "tau", "Theta", "Lambda_op", "tau_qsl")

NORM_REL_TOL = 1e-10
NORM_ABS_TOL = 1e-15
STATIONARY_NORM = 1e-14
FLAT_SPREAD = 1e-8
MIN_REACH = 0.25
MIRROR_SAMPLES = 32
SYMMETRY_TOL = 0.05


@dataclass(frozen=True)
class QslRecord:
    theta_angle: float
    lambda_op: float
    tau_qsl: float
    purity_0: float
    drive_time: float
    stationary: bool = False

    def bound_holds(self, slack=1e-12):
        return self.tau_qsl <= self.drive_time + slack


@dataclass(frozen=True)
class SweepAnalysis:
    """Result of scanning tau_QSL along one bath parameter."""
    location: float  # symmetry axis or turning point; None when flat or monotone
    spread: float

    @property
    def flat(self):
        return self.spread < FLAT_SPREAD


def relative_purity_angle(rho0, rho_t):
    """Theta = arccos sqrt(Tr[rho0 rho_t] / Tr[rho0^2]), argument clamped to [0, 1]."""
    p0 = states.purity(rho0)
    if not p0 > 0.0:
        raise DomainError(f"initial purity must be > 0, got {p0!r}")
    ratio = states.overlap(rho0, rho_t) / p0
    return math.acos(math.sqrt(min(max(ratio, 0.0), 1.0)))


def overlap_closed(params, alpha):
    """Tr[rho_0 rho_t] = [(1 + c3)^2 + (1 - c3)^2 + (c1 + c2)^2 + (c1 - c2) alpha] / 8."""
    c3 = params.c3
    return ((1.0 + c3) ** 2 + (1.0 - c3) ** 2 + params.inner ** 2 + params.corner * alpha) / 8.0


def _corner_rate(params, profile, tau):
    # d(alpha/4)/dt; only the |ee><gg| corners move
    return -params.corner * profile.rate(tau) * profile.attenuation(tau)


def liouvillian(params, profile, t):
    """d rho / dt: zero except the (ee, gg) corners."""
    m = np.zeros((4, 4), dtype=complex)
    corner = _corner_rate(params, profile, t)
    m[0, 3] = m[3, 0] = corner
    return m


def operator_norms(m):
    """(operator, Hilbert-Schmidt, trace) norms from the singular values."""
    s = linalg.svdvals(np.asarray(m, dtype=complex))
    return float(s.max(initial=0.0)), float(np.sqrt(np.sum(s * s))), float(np.sum(s))


def generator_norm(params, profile, tau):
    """Operator norm of the Liouvillian per unit of scaled time."""
    op, _, _ = operator_norms(liouvillian(params, profile, tau))
    return op / profile.bath.omega_c


def lambda_op_closed(params, profile, tau):
    """|c1 - c2| (1 - exp(-4 Gamma(tau))) / (4 tau), valid while gamma >= 0 on [0, tau]."""
    return abs(params.corner) * (1.0 - profile.attenuation(tau)) / (4.0 * tau)


def qsl_time(params, profile, drive_time):
    drive_time = float(drive_time)
    if not drive_time > 0.0:
        raise DomainError(f"drive time must be > 0, got {drive_time!r}")
    rho0 = states.build_initial(params)
    rho_t = states.evolve(params, profile.attenuation(drive_time))
    theta = relative_purity_angle(rho0, rho_t)
    p0 = states.purity(rho0)

    if params.stationary:
        lam = 0.0
    else:
        integral = bath.adaptive_integral(
            lambda t: generator_norm(params, profile, t),
            0.0, drive_time, rel_tol=NORM_REL_TOL, abs_tol=NORM_ABS_TOL,
        )
        lam = integral.value / drive_time
    if lam < STATIONARY_NORM:
        return QslRecord(theta, lam, 0.0, p0, drive_time, stationary=True)
    tau_qsl = math.sin(theta) ** 2 * p0 / lam
    return QslRecord(theta, lam, tau_qsl, p0, drive_time)


def qsl_sweep(params, profile, drive_time, thetas=None, rs=None, mapper=map):
    """
    tau_QSL over squeezing phases or strengths (exactly one of `thetas`, `rs`).
    Returns (values, QslRecords) with values aligned to the input order.
    """
    if (thetas is None) == (rs is None):
        raise ValueError("give exactly one of thetas or rs")
    if thetas is not None:
        points = list(thetas)
        variant = lambda v: profile.with_bath(profile.bath.with_squeezing(theta=v))
    else:
        points = list(rs)
        variant = lambda v: profile.with_bath(profile.bath.with_squeezing(r=v))
    records = list(mapper(lambda v: qsl_time(params, variant(v), drive_time), points))
    return [rec.tau_qsl for rec in records], records


def _spread(values):
    values = np.asarray(values, dtype=float)
    return float(values.max() - values.min()) if values.size else 0.0


def _mirror_mismatch(thetas, values, axis, spread):
    """RMS difference between the curve and its reflection about `axis`, relative to the spread."""
    reach = min(axis - thetas[0], thetas[-1] - axis)
    offsets = np.linspace(0.0, reach, MIRROR_SAMPLES + 1)[1:]
    left = np.interp(axis - offsets, thetas, values)
    right = np.interp(axis + offsets, thetas, values)
    return math.sqrt(float(np.mean((left - right) ** 2))) / spread


def symmetry_axis(thetas, values):
    """
    Axis theta* about which the sampled curve is most nearly mirror
    symmetric. Candidates must reach a quarter of the sampled span on both
    sides; the best sample point is refined between its neighbours. None for
    a flat curve or when no candidate is symmetric within SYMMETRY_TOL.
    """
    thetas = np.asarray(thetas, dtype=float)
    values = np.asarray(values, dtype=float)
    spread = _spread(values)
    if spread < FLAT_SPREAD:
        log.warning("tau_QSL is flat over theta (spread %.3e); no symmetry axis", spread)
        return SweepAnalysis(None, spread)

    margin = MIN_REACH * (thetas[-1] - thetas[0])
    lo, hi = thetas[0] + margin, thetas[-1] - margin
    candidates = thetas[(thetas >= lo) & (thetas <= hi)]
    if candidates.size == 0:
        candidates = np.array([0.5 * (lo + hi)])
    scores = [_mirror_mismatch(thetas, values, axis, spread) for axis in candidates]
    i = int(np.argmin(scores))
    best, best_score = float(candidates[i]), scores[i]

    step = float(np.max(np.diff(thetas)))
    bounds = (max(lo, best - step), min(hi, best + step))
    if bounds[0] < bounds[1]:
        refined = optimize.minimize_scalar(
            lambda axis: _mirror_mismatch(thetas, values, axis, spread),
            bounds=bounds, method="bounded", options={"xatol": 1e-9},
        )
        if refined.success and refined.fun < best_score:
            best, best_score = float(refined.x), float(refined.fun)

    if best_score > SYMMETRY_TOL:
        log.info("no symmetry axis over theta (best mismatch %.3f of the spread at %.4f)", best_score, best)
        return SweepAnalysis(None, spread)
    return SweepAnalysis(best, spread)


def turning_point(rs, values):
    """Location of the interior extremum of a sampled curve; None if flat or monotone."""
    values = np.asarray(values, dtype=float)
    spread = _spread(values)
    if spread < FLAT_SPREAD:
        log.warning("tau_QSL is flat over r (spread %.3e); no turning point", spread)
        return SweepAnalysis(None, spread)
    i = int(np.argmax(values))
    if i in (0, len(values) - 1):
        i = int(np.argmin(values))
    if i in (0, len(values) - 1):
        return SweepAnalysis(None, spread)
    return SweepAnalysis(float(np.asarray(rs, dtype=float)[i]), spread)


def csv_row(params, profile, record):
    return (params.c1, profile.bath.r, profile.bath.theta, record.drive_time,
            record.theta_angle, record.lambda_op, record.tau_qsl)
