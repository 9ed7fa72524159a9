"""
X-type two-qubit states, their common-bath evolution and dense 4x4 utilities.

Basis ordering is fixed to {|ee>, |eg>, |ge>, |gg>} with qubit A first, so
|e> is index 0 and |g> is index 1 on each factor.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from errors import DomainError, InvariantViolation, PhysicalityError

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_FLOOR = -1e-10
PARAM_TOL = 1e-12

_BELL = {
    "phi+": (1.0, -1.0, 1.0),
    "phi-": (-1.0, 1.0, 1.0),
    "psi+": (1.0, 1.0, -1.0),
    "psi-": (-1.0, -1.0, -1.0),
}


@dataclass(frozen=True)
class XStateParams:
    """Correlation triple (c1, c2, c3) of rho = [1 + sum_i c_i sigma_i x sigma_i] / 4."""
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        for name in ("c1", "c2", "c3"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or abs(value) > 1.0 + PARAM_TOL:
                raise PhysicalityError(f"|{name}| <= 1 violated: {name} = {value}")
            object.__setattr__(self, name, value)
        c1, c2, c3 = self.c1, self.c2, self.c3
        if 1.0 + c3 < abs(c1 - c2) - PARAM_TOL:
            raise PhysicalityError(
                f"1 + c3 >= |c1 - c2| violated: 1 + c3 = {1.0 + c3:.12g} < |c1 - c2| = {abs(c1 - c2):.12g}")
        if 1.0 - c3 < abs(c1 + c2) - PARAM_TOL:
            raise PhysicalityError(
                f"1 - c3 >= |c1 + c2| violated: 1 - c3 = {1.0 - c3:.12g} < |c1 + c2| = {abs(c1 + c2):.12g}")

    @property
    def corner(self):
        """c1 - c2, the coherence that dephases."""
        return self.c1 - self.c2

    @property
    def inner(self):
        """c1 + c2, the coherence inside the dephasing-free block."""
        return self.c1 + self.c2

    @property
    def stationary(self):
        return self.c1 == self.c2

    def mirrored(self):
        return XStateParams(-self.c1, -self.c2, self.c3)

    def with_c1(self, c1):
        return XStateParams(c1, self.c2, self.c3)

    def as_tuple(self):
        return (self.c1, self.c2, self.c3)

    @classmethod
    def werner(cls, c):
        """Singlet Werner family c1 = c2 = c3 = -c, physical for -1/3 <= c <= 1."""
        return cls(-c, -c, -c)

    @classmethod
    def bell(cls, name="phi+"):
        try:
            return cls(*_BELL[name])
        except KeyError:
            raise PhysicalityError(f"unknown Bell state '{name}' (known: {', '.join(_BELL)})") from None

    @staticmethod
    def is_physical(c1, c2, c3):
        try:
            XStateParams(c1, c2, c3)
        except PhysicalityError:
            return False
        return True


@dataclass(frozen=True, eq=False)
class DensityMatrix4:
    """Validated 4x4 density matrix; entries are stored read-only."""
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise InvariantViolation(f"two-qubit density matrix must be 4x4, got {m.shape}")
        ok, reason = is_density_matrix(m)
        if not ok:
            raise InvariantViolation(reason)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __getitem__(self, index):
        return self.entries[index]

    def trace(self):
        return float(np.trace(self.entries).real)

    def eigenvalues(self):
        return linalg.eigvalsh(self.entries)

    def allclose(self, other, atol=1e-12):
        return np.allclose(self.entries, as_matrix(other), rtol=0.0, atol=atol)


@dataclass(frozen=True)
class SpectrumRecord:
    """Four eigenvalues mu_1..mu_4 of a two-qubit state."""
    mu: tuple

    def __post_init__(self):
        mu = tuple(float(m) for m in self.mu)
        if len(mu) != 4:
            raise InvariantViolation(f"spectrum needs four eigenvalues, got {len(mu)}")
        for m in mu:
            if m < EIGEN_FLOOR or m > 1.0 + TRACE_TOL:
                raise InvariantViolation(f"eigenvalue {m!r} outside [{EIGEN_FLOOR}, 1]")
        if abs(math.fsum(mu) - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"eigenvalues sum to {math.fsum(mu)!r}, not 1")
        object.__setattr__(self, "mu", mu)

    def sorted(self):
        return tuple(sorted(self.mu))


def as_matrix(rho):
    if isinstance(rho, DensityMatrix4):
        return rho.entries
    return np.asarray(rho, dtype=complex)


def is_density_matrix(m):
    """(ok, reason) for hermiticity, unit trace and positivity within tolerance."""
    m = np.asarray(m, dtype=complex)
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        return False, "matrix is not Hermitian"
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        return False, f"trace is {tr.real!r}, not 1"
    lowest = float(linalg.eigvalsh(m)[0])
    if lowest < EIGEN_FLOOR:
        return False, f"eigenvalue {lowest!r} below {EIGEN_FLOOR}"
    return True, "valid density matrix"


def x_state_matrix(params, alpha):
    """Matrix of the X state with corner coherence alpha (alpha = c1 - c2 at t = 0)."""
    c3, inner = params.c3, params.inner
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 1.0 + c3
    m[1, 1] = m[2, 2] = 1.0 - c3
    m[0, 3] = m[3, 0] = alpha
    m[1, 2] = m[2, 1] = inner
    return m / 4.0


def build_initial(params):
    return DensityMatrix4(x_state_matrix(params, params.corner))


def evolve(params, attenuation):
    """
    Common-bath dephasing: only the |ee><gg| corners decay, by exp(-4 Gamma).
    The inner block and the diagonal are untouched.
    """
    attenuation = float(attenuation)
    if not 0.0 < attenuation <= 1.0:
        raise DomainError(f"attenuation must lie in (0, 1], got {attenuation!r}")
    return DensityMatrix4(x_state_matrix(params, params.corner * attenuation))


def _check_alpha(params, alpha):
    if abs(alpha) > abs(params.corner) + PARAM_TOL:
        raise DomainError(f"|alpha| = {abs(alpha)!r} exceeds |c1 - c2| = {abs(params.corner)!r}")


def eigenvalues_closed(params, alpha):
    _check_alpha(params, alpha)
    c3, inner = params.c3, params.inner
    return SpectrumRecord((
        (1.0 + c3 - alpha) / 4.0,
        (1.0 + c3 + alpha) / 4.0,
        (1.0 - c3 - inner) / 4.0,
        (1.0 - c3 + inner) / 4.0,
    ))


def clamp_eigenvalues(values):
    """Round-off negatives in [-1e-10, 0) become 0; anything lower is a bug."""
    values = np.asarray(values, dtype=float)
    lowest = float(values.min()) if values.size else 0.0
    if lowest < EIGEN_FLOOR:
        raise InvariantViolation(f"eigenvalue {lowest!r} below {EIGEN_FLOOR}")
    if lowest < 0.0:
        log.debug("clamping eigenvalue %r to 0", lowest)
    return np.clip(values, 0.0, None)


def shannon_bits(probabilities):
    """-sum p log2 p with 0 log 0 = 0."""
    p = np.asarray(probabilities, dtype=float)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def spectrum(rho):
    if isinstance(rho, SpectrumRecord):
        return np.array(rho.mu)
    return clamp_eigenvalues(linalg.eigvalsh(as_matrix(rho)))


def von_neumann_entropy(rho):
    """S(rho) = -Tr rho log2 rho in bits; accepts a matrix or a SpectrumRecord."""
    if isinstance(rho, SpectrumRecord):
        return shannon_bits(clamp_eigenvalues(rho.mu))
    return shannon_bits(spectrum(rho))


def partial_trace(rho, keep):
    """Reduced state of qubit 'A' or 'B'."""
    t = as_matrix(rho).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def marginals(rho):
    return partial_trace(rho, "A"), partial_trace(rho, "B")


def purity(rho):
    m = as_matrix(rho)
    return float(np.real(np.trace(m @ m)))


def overlap(rho, sigma):
    """Tr[rho sigma] (real for Hermitian arguments)."""
    return float(np.real(np.trace(as_matrix(rho) @ as_matrix(sigma))))


# --- JSON dump ---

def density_matrix_to_json(rho):
    """Row-major nested list of [re, im] pairs."""
    m = as_matrix(rho)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def density_matrix_from_json(rows):
    m = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    return DensityMatrix4(m)
