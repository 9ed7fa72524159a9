"""
Mutual information, classical correlation and quantum discord of two qubits.

Closed forms hold for X states with maximally mixed marginals. The brute-force
oracle works for any two-qubit state: it maximizes the measurement-based
classical correlation over projective measurements on qubit B, first on a
(vartheta, phi) grid and then with a Nelder-Mead refinement.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

import states
from errors import DomainError, InvariantViolation

log = logging.getLogger(__name__)

CSV_HEADER = ("tau", "gamma", "alpha", "I", "C", "chi", "Q")

DEFAULT_GRID = 200
DEFAULT_REFINE_TOL = 1e-8
DEGENERATE_PROBABILITY = 1e-14
CHI_TOL = 1e-12


@dataclass(frozen=True)
class CorrelationRecord:
    tau: float
    gamma: float
    alpha: float
    mutual_info: float
    classical: float
    chi: float
    discord: float

    def __post_init__(self):
        if self.discord < -1e-10:
            raise InvariantViolation(f"negative discord {self.discord!r}")
        if self.classical < -1e-10:
            raise InvariantViolation(f"negative classical correlation {self.classical!r}")
        if abs(self.mutual_info - self.discord - self.classical) > 1e-12:
            raise InvariantViolation("I != Q + C")
        if not -CHI_TOL <= self.chi <= 1.0 + CHI_TOL:
            raise InvariantViolation(f"chi = {self.chi!r} outside [0, 1]")

    def csv_row(self):
        return (self.tau, self.gamma, self.alpha, self.mutual_info, self.classical, self.chi, self.discord)


@dataclass(frozen=True)
class ChiResult:
    value: float
    branch: str  # "omega" or "c3"

    @property
    def omega_branch(self):
        return self.branch == "omega"


@dataclass(frozen=True)
class ProjectorParams:
    """
    Measurement angles of |v1> = cos(vartheta)|g> + e^{i phi} sin(vartheta)|e>,
    |v2> = e^{-i phi} sin(vartheta)|g> - cos(vartheta)|e>; folded into
    vartheta in [0, pi/2], phi in [0, 2 pi).
    """
    vartheta: float
    phi: float

    def __post_init__(self):
        vartheta = float(self.vartheta) % math.pi
        phi = float(self.phi)
        if vartheta > math.pi / 2.0:
            # (pi - v, phi) describes the same projector pair as (v, phi + pi)
            vartheta = math.pi - vartheta
            phi += math.pi
        object.__setattr__(self, "vartheta", vartheta)
        object.__setattr__(self, "phi", phi % (2.0 * math.pi))

    def vectors(self):
        v1, v2 = _measurement_vectors(np.array([self.vartheta]), np.array([self.phi]))
        return v1[0], v2[0]

    def projectors(self):
        return [np.outer(v, v.conj()) for v in self.vectors()]


@dataclass(frozen=True)
class MeasurementResult:
    value: float
    angles: ProjectorParams
    evaluations: int


# --- Closed forms ---

def _xlog2x(x):
    return x * math.log2(x) if x > 0.0 else 0.0


def mutual_information_closed(spectrum):
    """I = 2 + sum_n mu_n log2 mu_n for maximally mixed marginals."""
    mu = spectrum.mu if isinstance(spectrum, states.SpectrumRecord) else spectrum
    return 2.0 + math.fsum(_xlog2x(max(m, 0.0)) for m in mu)


def chi(params, alpha):
    """
    max(|c3|, Omega) with Omega = (|alpha| + |c1 + c2|) / 2.
    Exact ties report the |c3| branch.
    """
    states._check_alpha(params, alpha)
    omega = (abs(alpha) + abs(params.inner)) / 2.0
    c3 = abs(params.c3)
    if omega > c3:
        return ChiResult(omega, "omega")
    return ChiResult(c3, "c3")


def classical_correlation_closed(chi_value):
    """C = sum_j (1 + (-1)^j chi)/2 log2(1 + (-1)^j chi)."""
    x = chi_value.value if isinstance(chi_value, ChiResult) else float(chi_value)
    if not -CHI_TOL <= x <= 1.0 + CHI_TOL:
        raise DomainError(f"chi must lie in [0, 1], got {x!r}")
    x = min(max(x, 0.0), 1.0)
    return 0.5 * (_xlog2x(1.0 - x) + _xlog2x(1.0 + x))


def discord_closed(params, alpha, tau=0.0, gamma=0.0):
    """Assemble I, chi, C and Q = I - C for the X state with corner coherence alpha."""
    mutual = mutual_information_closed(states.eigenvalues_closed(params, alpha))
    x = chi(params, alpha)
    classical = classical_correlation_closed(x)
    return CorrelationRecord(
        tau=float(tau),
        gamma=float(gamma),
        alpha=float(alpha),
        mutual_info=mutual,
        classical=classical,
        chi=x.value,
        discord=mutual - classical,
    )


# --- Generic entropies ---

def mutual_information(rho):
    """S(rho_A) + S(rho_B) - S(rho_AB) from dense spectra."""
    rho_a, rho_b = states.marginals(rho)
    return (states.von_neumann_entropy(rho_a) + states.von_neumann_entropy(rho_b)
            - states.von_neumann_entropy(rho))


# --- Brute-force oracle ---

def _measurement_vectors(vartheta, phi):
    # components ordered (e, g)
    s, c = np.sin(vartheta), np.cos(vartheta)
    v1 = np.stack([np.exp(1j * phi) * s, c + 0j], axis=-1)
    v2 = np.stack([-c + 0j, np.exp(-1j * phi) * s], axis=-1)
    return v1, v2


def _binary_entropy_of_block(blocks):
    """p * S(block / p) for a stack of unnormalized 2x2 Hermitian blocks; 0 where p vanishes."""
    p = np.real(blocks[:, 0, 0] + blocks[:, 1, 1])
    diff = np.real(blocks[:, 0, 0] - blocks[:, 1, 1])
    radius = np.sqrt(diff * diff + 4.0 * np.abs(blocks[:, 0, 1]) ** 2)
    live = p > DEGENERATE_PROBABILITY
    safe_p = np.where(live, p, 1.0)
    total = np.zeros_like(p)
    for sign in (1.0, -1.0):
        lam = np.clip((p + sign * radius) / 2.0, 0.0, None) / safe_p
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(lam > 0.0, -lam * np.log2(np.where(lam > 0.0, lam, 1.0)), 0.0)
        total += term
    return np.where(live, p * total, 0.0)


def conditional_entropy(rho, vartheta, phi):
    """sum_k p_k S(rho_A|k) for measurement angles (arrays of equal shape)."""
    t = states.as_matrix(rho).reshape(2, 2, 2, 2)
    vartheta = np.atleast_1d(np.asarray(vartheta, dtype=float)).ravel()
    phi = np.atleast_1d(np.asarray(phi, dtype=float)).ravel()
    result = np.zeros(vartheta.shape)
    for v in _measurement_vectors(vartheta, phi):
        blocks = np.einsum("nb,ibjc,nc->nij", v.conj(), t, v)
        result += _binary_entropy_of_block(blocks)
    return result


def classical_correlation_bruteforce(rho, grid=DEFAULT_GRID, refine=DEFAULT_REFINE_TOL):
    """
    max over projective measurements on B of S(rho_A) - sum_k p_k S(rho_A|k).

    A grid x grid search over vartheta in [0, pi/2], phi in [0, 2 pi) seeds a
    Nelder-Mead refinement converged to `refine` in the objective.
    """
    entropy_a = states.von_neumann_entropy(states.partial_trace(rho, "A"))

    varthetas = np.linspace(0.0, math.pi / 2.0, grid)
    phis = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    vv, pp = np.meshgrid(varthetas, phis, indexing="ij")
    objective = entropy_a - conditional_entropy(rho, vv, pp)
    best = int(np.argmax(objective))
    seed = np.array([vv.ravel()[best], pp.ravel()[best]])
    grid_value = float(objective[best])

    def loss(x):
        return -(entropy_a - conditional_entropy(rho, x[0], x[1])[0])

    step_v = varthetas[1] - varthetas[0] if grid > 1 else 0.1
    step_p = phis[1] - phis[0] if grid > 1 else 0.1
    simplex = np.array([seed, seed + [step_v, 0.0], seed + [0.0, step_p]])
    refined = optimize.minimize(
        loss, seed, method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-8, "fatol": refine * 1e-3, "maxiter": 2000},
    )
    value, angles = grid_value, seed
    if -refined.fun > grid_value:
        value, angles = float(-refined.fun), refined.x
    log.debug("brute-force C: grid %.12g, refined %.12g", grid_value, -refined.fun)
    return MeasurementResult(
        value=value,
        angles=ProjectorParams(float(angles[0]), float(angles[1])),
        evaluations=grid * grid + int(refined.nfev),
    )


def discord_bruteforce(rho, grid=DEFAULT_GRID, refine=DEFAULT_REFINE_TOL):
    """Q = I(rho) - C(rho) with I from generic entropies and C from the oracle."""
    return mutual_information(rho) - classical_correlation_bruteforce(rho, grid, refine).value
