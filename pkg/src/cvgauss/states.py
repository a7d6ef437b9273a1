"""Gaussian states on phase space: covariance matrices plus displacements.

A state is the pair (cov, disp) with ``cov`` a real symmetric 2n x 2n
matrix in (X1, P1, ..., Xn, Pn) ordering and ``disp`` the vector of
canonical expectation values.  The vacuum has ``cov == identity`` and
``disp == 0``.  A symmetric matrix is a physical covariance matrix exactly
when the Hermitian matrix ``cov + 1j*sigma`` is positive semidefinite,
equivalently when every symplectic eigenvalue is at least 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PhysicalityError
from .symplectic import (
    hermitian_min_eig,
    is_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
)

__all__ = [
    "TOL_PSD",
    "GaussianState",
    "ModePartition",
    "ValidityReport",
    "validate_covariance",
    "require_valid",
    "vacuum_state",
    "thermal_state",
    "squeezed_vacuum_state",
    "two_mode_squeezed_cov",
    "two_mode_squeezed_state",
    "apply_symplectic",
    "characteristic_function",
    "wigner_at",
    "mean_photon_number",
    "is_squeezed",
]

#: tolerance on the minimum eigenvalue of cov + i*sigma
TOL_PSD = 1e-9


@dataclass(frozen=True)
class GaussianState:
    """Immutable covariance matrix / displacement pair."""

    cov: np.ndarray
    disp: np.ndarray = None

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError("covariance matrix must be square with even dimension")
        disp = self.disp
        if disp is None:
            disp = np.zeros(cov.shape[0])
        disp = np.array(disp, dtype=float).ravel()
        if disp.shape[0] != cov.shape[0]:
            raise ValueError("displacement length must match covariance dimension")
        if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(disp)):
            raise ValueError("state entries must be finite")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "disp", disp)

    @property
    def n(self) -> int:
        return self.cov.shape[0] // 2


@dataclass(frozen=True)
class ModePartition:
    """Assignment of each mode to party A or party B."""

    labels: tuple

    def __post_init__(self):
        labels = tuple(str(x).upper() for x in self.labels)
        if not labels or any(x not in ("A", "B") for x in labels):
            raise ValueError("labels must be a non-empty sequence over {'A', 'B'}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_string(cls, text: str) -> "ModePartition":
        return cls(tuple(text.strip()))

    @classmethod
    def from_counts(cls, n_a: int, n_b: int) -> "ModePartition":
        return cls(("A",) * n_a + ("B",) * n_b)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def a_modes(self) -> "list[int]":
        return [i for i, x in enumerate(self.labels) if x == "A"]

    @property
    def b_modes(self) -> "list[int]":
        return [i for i, x in enumerate(self.labels) if x == "B"]

    @property
    def n_a(self) -> int:
        return len(self.a_modes)

    @property
    def n_b(self) -> int:
        return len(self.b_modes)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the uncertainty-relation check for a covariance matrix."""

    valid: bool
    min_uncertainty_eigenvalue: float
    symplectic_eigenvalues: np.ndarray = field(repr=False)


def validate_covariance(gamma: np.ndarray, tol_psd: float = TOL_PSD) -> ValidityReport:
    """Check whether ``gamma`` is a physical covariance matrix.

    The matrix is valid when it is symmetric and the Hermitian matrix
    ``gamma + 1j*sigma`` has smallest eigenvalue >= -tol_psd; that witness
    eigenvalue is always reported, together with the symplectic spectrum.

    Raises:
        ValueError: for a non-symmetric or odd-dimensional input; this is a
            structural failure, distinct from a report with ``valid=False``.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        raise ValueError("covariance matrix must be square with even dimension")
    scale = max(1.0, float(np.max(np.abs(gamma))))
    if np.max(np.abs(gamma - gamma.T)) > 1e-8 * scale:
        raise ValueError("covariance matrix must be symmetric")
    n = gamma.shape[0] // 2
    min_eig = hermitian_min_eig(0.5 * (gamma + gamma.T), symplectic_form(n))
    nus = symplectic_eigenvalues(gamma)
    return ValidityReport(bool(min_eig >= -tol_psd), min_eig, nus)


def require_valid(gamma: np.ndarray, tol_psd: float = TOL_PSD) -> ValidityReport:
    """Validate and raise :class:`PhysicalityError` on an unphysical matrix."""
    report = validate_covariance(gamma, tol_psd)
    if not report.valid:
        raise PhysicalityError(
            "covariance matrix violates the uncertainty relation "
            f"(witness eigenvalue {report.min_uncertainty_eigenvalue:.3e})"
        )
    return report


def vacuum_state(n: int) -> GaussianState:
    """n-mode vacuum: identity covariance, zero displacement."""
    if n < 1:
        raise ValueError("mode count must be at least 1")
    return GaussianState(np.eye(2 * n))


def thermal_state(nu) -> GaussianState:
    """Thermal state with the given symplectic eigenvalue(s) nu = 2*nbar + 1."""
    nus = np.atleast_1d(np.asarray(nu, dtype=float))
    if np.any(nus < 1.0):
        raise PhysicalityError("thermal parameter must be >= 1")
    return GaussianState(np.diag(np.repeat(nus, 2)))


def squeezed_vacuum_state(r: float) -> GaussianState:
    """Single-mode squeezed vacuum with variances (e^{2r}, e^{-2r})."""
    return GaussianState(np.diag([np.exp(2.0 * r), np.exp(-2.0 * r)]))


def two_mode_squeezed_cov(r: float) -> np.ndarray:
    """Covariance matrix of the two-mode squeezed state with parameter r.

    Diagonal entries cosh(2r); X-X correlation +sinh(2r), P-P correlation
    -sinh(2r).
    """
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    z = np.diag([s, -s])
    return np.block([[c * np.eye(2), z], [z, c * np.eye(2)]])


def two_mode_squeezed_state(r: float) -> GaussianState:
    return GaussianState(two_mode_squeezed_cov(r))


def apply_symplectic(state: GaussianState, s: np.ndarray) -> GaussianState:
    """Congruence action of a symplectic matrix: cov -> S cov S^T, d -> S d."""
    s = np.asarray(s, dtype=float)
    if s.shape != state.cov.shape:
        raise ValueError("symplectic matrix does not match the state dimension")
    if not is_symplectic(s, tol=1e-6):
        raise ValueError("transformation matrix is not symplectic")
    return GaussianState(s @ state.cov @ s.T, s @ state.disp)


def characteristic_function(state: GaussianState, xi: np.ndarray) -> complex:
    """Gaussian characteristic function evaluated at a phase-space point.

    chi(xi) = exp(-xi^T (sigma cov sigma^T) xi / 4 + i (sigma d)^T xi); the
    value at xi = 0 is 1 and |chi| <= 1 everywhere for a valid state.
    """
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.shape[0] != 2 * state.n:
        raise ValueError("phase-space point has wrong dimension")
    form = symplectic_form(state.n)
    u = form.T @ xi
    quad = float(u @ state.cov @ u)
    phase = float(xi @ form @ state.disp)
    return complex(np.exp(-0.25 * quad + 1j * phase))


def wigner_at(state: GaussianState, xi: np.ndarray) -> float:
    """Wigner function of a Gaussian state at one phase-space point."""
    xi = np.asarray(xi, dtype=float).ravel()
    n = state.n
    if xi.shape[0] != 2 * n:
        raise ValueError("phase-space point has wrong dimension")
    det = np.linalg.det(state.cov)
    if det <= 0 or not np.isfinite(det):
        raise PhysicalityError("Wigner evaluation needs a nonsingular covariance matrix")
    delta = xi - state.disp
    expo = -float(delta @ np.linalg.solve(state.cov, delta))
    return float(np.exp(expo) / (np.pi ** n * np.sqrt(det)))


def mean_photon_number(state: GaussianState) -> float:
    """Total mean photon number from second moments and displacements.

    Per mode: (cov_xx + cov_pp)/4 + (d_x^2 + d_p^2)/2 - 1/2.
    """
    g, d = state.cov, state.disp
    total = 0.0
    for k in range(state.n):
        total += (g[2 * k, 2 * k] + g[2 * k + 1, 2 * k + 1]) / 4.0
        total += (d[2 * k] ** 2 + d[2 * k + 1] ** 2) / 2.0
        total -= 0.5
    return float(total)


def is_squeezed(state_or_cov) -> bool:
    """A state is squeezed when some covariance eigenvalue drops below 1."""
    gamma = state_or_cov.cov if isinstance(state_or_cov, GaussianState) else np.asarray(state_or_cov, float)
    return bool(np.linalg.eigvalsh(gamma)[0] < 1.0 - 1e-12)
