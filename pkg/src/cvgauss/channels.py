"""Irreversible Gaussian operations: channels, conditional measurements,
and general Gaussian completely positive maps.

A channel acts on second moments as ``cov -> A cov A^T + G`` and is
completely positive exactly when the Hermitian matrix
``G + i sigma_out - i A sigma_in A^T`` is positive semidefinite.

Conditional maps (vacuum projection, homodyne detection) update the
covariance matrix exactly; the conditional displacement depends on the
measurement record, so these functions return states in the
outcome-averaged frame with zero displacement.  All entanglement
quantities in this package are displacement-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PhysicalityError
from .states import GaussianState, ModePartition, require_valid, TOL_PSD
from .symplectic import direct_sum, hermitian_min_eig, mode_permutation, symplectic_form

__all__ = [
    "GaussianChannel",
    "GaussianCPMap",
    "CPReport",
    "channel_valid",
    "require_valid_channel",
    "apply_channel",
    "attenuation_channel",
    "vacuum_project",
    "homodyne_condition",
    "cp_map_valid",
    "apply_cp_map",
    "channel_as_cp_map",
    "log_channel_verify",
]

#: relative cutoff for Moore-Penrose pseudo-inverses of rank-deficient blocks
PINV_RCOND = 1e-12


@dataclass(frozen=True)
class GaussianChannel:
    """Second-moment action (a, g) plus a displacement shift.

    ``a`` maps input to output coordinates (2n_out x 2n_in), ``g`` is the
    symmetric noise block, ``shift`` the added displacement.
    """

    a: np.ndarray
    g: np.ndarray
    shift: np.ndarray = None

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        g = np.array(self.g, dtype=float)
        if a.ndim != 2 or g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("channel matrices must be 2-D with square noise block")
        if a.shape[0] != g.shape[0] or a.shape[0] % 2 or a.shape[1] % 2:
            raise ValueError("channel matrices have inconsistent shapes")
        if np.max(np.abs(g - g.T)) > 1e-8 * max(1.0, float(np.max(np.abs(g)))):
            raise ValueError("noise block must be symmetric")
        shift = self.shift
        if shift is None:
            shift = np.zeros(a.shape[0])
        shift = np.array(shift, dtype=float).ravel()
        if shift.shape[0] != a.shape[0]:
            raise ValueError("shift length must match the output dimension")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "g", 0.5 * (g + g.T))
        object.__setattr__(self, "shift", shift)

    @property
    def n_in(self) -> int:
        return self.a.shape[1] // 2

    @property
    def n_out(self) -> int:
        return self.a.shape[0] // 2


@dataclass(frozen=True)
class GaussianCPMap:
    """General Gaussian CP map on n modes, held as a 2n-mode matrix.

    ``gamma`` is the 4n x 4n symmetric matrix satisfying
    ``gamma + i sigma >= 0``, partitioned into an output-like leading block
    and an input-like trailing block; ``disp`` is the optional 4n
    displacement of the representation.
    """

    gamma: np.ndarray
    disp: np.ndarray = None

    def __post_init__(self):
        g = np.array(self.gamma)
        if g.dtype != np.longdouble:
            # extended precision is preserved when supplied; representatives
            # of deterministic channels need it for their cancellations
            g = g.astype(float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 4:
            raise ValueError("map matrix must be square with dimension divisible by 4")
        disp = self.disp
        if disp is None:
            disp = np.zeros(g.shape[0])
        disp = np.array(disp, dtype=float).ravel()
        if disp.shape[0] != g.shape[0]:
            raise ValueError("map displacement has wrong length")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "disp", disp)

    @property
    def n(self) -> int:
        return self.gamma.shape[0] // 4


@dataclass(frozen=True)
class CPReport:
    valid: bool
    min_eigenvalue: float


def channel_valid(ch: GaussianChannel, tol_psd: float = TOL_PSD) -> CPReport:
    """Complete-positivity test with witness eigenvalue.

    Valid iff ``G + i(sigma_out - A sigma_in A^T)`` has smallest eigenvalue
    >= -tol_psd.
    """
    imag = symplectic_form(ch.n_out) - ch.a @ symplectic_form(ch.n_in) @ ch.a.T
    min_eig = hermitian_min_eig(ch.g, 0.5 * (imag - imag.T))
    return CPReport(bool(min_eig >= -tol_psd), min_eig)


def require_valid_channel(ch: GaussianChannel, tol_psd: float = TOL_PSD) -> None:
    rep = channel_valid(ch, tol_psd)
    if not rep.valid:
        raise PhysicalityError(
            f"channel violates complete positivity (witness eigenvalue {rep.min_eigenvalue:.3e})"
        )


def apply_channel(state: GaussianState, ch: GaussianChannel) -> GaussianState:
    """Push a state through a channel: cov -> A cov A^T + G, d -> A d + shift."""
    if ch.n_in != state.n:
        raise ValueError("channel input dimension does not match the state")
    require_valid_channel(ch)
    cov = ch.a @ state.cov @ ch.a.T + ch.g
    return GaussianState(0.5 * (cov + cov.T), ch.a @ state.disp + ch.shift)


def attenuation_channel(eta: float, n: int = 1) -> GaussianChannel:
    """Pure-loss channel of transmissivity eta on n modes.

    ``A = sqrt(eta) * I`` and ``G = (1 - eta) * I``; eta = 1 is the identity
    and eta = 0 replaces any input with the vacuum.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    dim = 2 * n
    return GaussianChannel(np.sqrt(eta) * np.eye(dim), (1.0 - eta) * np.eye(dim))


def _split_mode_blocks(state: GaussianState, mode: int):
    """Reorder so the measured mode comes last; return (A, B, C, d_rest, d_mode)."""
    n = state.n
    if not 0 <= mode < n:
        raise ValueError("mode index out of range")
    order = [m for m in range(n) if m != mode] + [mode]
    perm = mode_permutation(order)
    g = perm @ state.cov @ perm.T
    d = perm @ state.disp
    k = 2 * (n - 1)
    return g[:k, :k], g[k:, k:], g[:k, k:], d[:k], d[k:]


def vacuum_project(state: GaussianState, mode: int) -> "tuple[GaussianState, float]":
    """Condition on projecting one mode onto the vacuum.

    The remaining covariance is the Schur complement
    ``A - C (B + I)^{-1} C^T``; returns the conditioned state (zero
    displacement, see module note) and the success probability of the
    projection.
    """
    require_valid(state.cov)
    if state.n < 2:
        raise ValueError("need at least one unmeasured mode")
    a, b, c, _d_rest, d_mode = _split_mode_blocks(state, mode)
    core = b + np.eye(2)
    inv = np.linalg.inv(core)
    cov = a - c @ inv @ c.T
    prob = 2.0 / np.sqrt(np.linalg.det(core)) * float(np.exp(-d_mode @ inv @ d_mode))
    return GaussianState(0.5 * (cov + cov.T)), float(prob)


def homodyne_condition(state: GaussianState, mode: int, quadrature: str = "X") -> GaussianState:
    """Condition on an ideal homodyne measurement of one quadrature.

    The covariance update is ``A - C (pi B pi)^+ C^T`` with ``pi`` the
    projector onto the measured quadrature and a pseudo-inverse in place of
    the inverse; by construction the update does not involve the outcome,
    so no outcome parameter exists.
    """
    require_valid(state.cov)
    if state.n < 2:
        raise ValueError("need at least one unmeasured mode")
    quadrature = quadrature.upper()
    if quadrature not in ("X", "P"):
        raise ValueError("quadrature must be 'X' or 'P'")
    a, b, c, _d_rest, _d_mode = _split_mode_blocks(state, mode)
    pi = np.diag([1.0, 0.0]) if quadrature == "X" else np.diag([0.0, 1.0])
    core = pi @ b @ pi
    cov = a - c @ np.linalg.pinv(core, rcond=PINV_RCOND) @ c.T
    return GaussianState(0.5 * (cov + cov.T))


def cp_map_valid(m: GaussianCPMap, tol_psd: float = TOL_PSD) -> CPReport:
    """Positivity test gamma + i sigma >= 0 for a Gaussian CP map.

    The tolerance scales with the magnitude of the matrix so that maps with
    large witness blocks (such as near-ideal channel representatives) are
    not rejected for eigensolver roundoff.
    """
    if np.max(np.abs(m.gamma - m.gamma.T)) > 1e-8 * max(1.0, float(np.max(np.abs(m.gamma)))):
        raise ValueError("map matrix must be symmetric")
    g = np.asarray(0.5 * (m.gamma + m.gamma.T), dtype=float)
    min_eig = hermitian_min_eig(g, symplectic_form(2 * m.n))
    tol = max(tol_psd, 1e-12 * float(np.max(np.abs(g))) * g.shape[0])
    return CPReport(bool(min_eig >= -tol), min_eig)


def _flip_second_half(n: int) -> np.ndarray:
    signs = np.ones(4 * n)
    for k in range(n, 2 * n):
        signs[2 * k + 1] = -1.0
    return np.diag(signs)


def apply_cp_map(state: GaussianState, m: GaussianCPMap) -> GaussianState:
    """Apply a general Gaussian CP map to a state.

    Output covariance: ``Gt_1 - Gt_12 (Gt_2 + cov)^{-1} Gt_12^T`` where
    ``Gt = F gamma F`` flips the momenta of the input-like block; a
    pseudo-inverse stands in when the core is singular.  Evaluated in
    extended precision: representatives of deterministic channels carry
    large witness blocks whose contributions cancel only analytically.
    """
    rep = cp_map_valid(m)
    if not rep.valid:
        raise PhysicalityError(
            f"map matrix violates gamma + i sigma >= 0 (witness {rep.min_eigenvalue:.3e})"
        )
    n = m.n
    if state.n != n:
        raise ValueError("map dimension does not match the state")
    f = _flip_second_half(n).astype(np.longdouble)
    gt = f @ m.gamma.astype(np.longdouble) @ f
    g1 = gt[: 2 * n, : 2 * n]
    g12 = gt[: 2 * n, 2 * n :]
    g2 = gt[2 * n :, 2 * n :]
    core_ld = g2 + state.cov.astype(np.longdouble)
    core = np.asarray(core_ld, dtype=float)
    if abs(np.linalg.det(core)) < 1e-280 or np.linalg.cond(core) > 1e14:
        inv = np.linalg.pinv(core, rcond=PINV_RCOND).astype(np.longdouble)
    else:
        inv = np.linalg.inv(core).astype(np.longdouble)
        # one refinement step keeps the large-witness cancellation accurate
        inv = inv + inv @ (np.eye(2 * n, dtype=np.longdouble) - core_ld @ inv)
    cov_ld = g1 - g12 @ inv @ g12.T
    cov = np.asarray(cov_ld, dtype=float)
    return GaussianState(0.5 * (cov + cov.T))


def channel_as_cp_map(ch: GaussianChannel, witness_cosh: float = 1.0e10) -> GaussianCPMap:
    """Map-matrix representative of a channel, built on a two-mode witness.

    The representative is the covariance matrix obtained by sending one half
    of a strongly correlated pair through the channel; it reproduces the
    channel action up to corrections of order 1/witness_cosh, which is the
    reason :func:`apply_cp_map` works in extended precision.  Channels must
    be square (n_in == n_out).
    """
    if ch.n_in != ch.n_out:
        raise ValueError("map representation requires equal input and output mode counts")
    require_valid_channel(ch)
    n = ch.n_in
    c = np.longdouble(witness_cosh)
    s = np.sqrt(c * c - 1.0)
    z = np.diag(np.ravel([(1.0, -1.0)] * n)).astype(np.longdouble)
    a = ch.a.astype(np.longdouble)
    top_left = c * a @ a.T + ch.g.astype(np.longdouble)
    top_right = s * a @ z
    gamma = np.block([[top_left, top_right], [top_right.T, c * np.eye(2 * n, dtype=np.longdouble)]])
    return GaussianCPMap(0.5 * (gamma + gamma.T))


def log_channel_verify(
    gamma: np.ndarray,
    gamma_prime: np.ndarray,
    ch_a: GaussianChannel,
    ch_b: GaussianChannel,
    partition: "ModePartition | None" = None,
    tol: float = 1e-8,
) -> bool:
    """Certificate check for convertibility by local Gaussian channels.

    True iff applying ``ch_a`` to party A and ``ch_b`` to party B maps
    ``gamma`` to ``gamma_prime`` within ``tol``.  This verifies a given
    certificate; it does not search for one.
    """
    gamma = np.asarray(gamma, dtype=float)
    gamma_prime = np.asarray(gamma_prime, dtype=float)
    require_valid_channel(ch_a)
    require_valid_channel(ch_b)
    if ch_a.n_in != ch_a.n_out or ch_b.n_in != ch_b.n_out:
        raise ValueError("local channels must preserve their party's mode count")
    n = gamma.shape[0] // 2
    if partition is None:
        partition = ModePartition.from_counts(ch_a.n_in, ch_b.n_in)
    if partition.n_a != ch_a.n_in or partition.n_b != ch_b.n_in or partition.n != n:
        raise ValueError("channels do not match the partition")
    perm = mode_permutation(partition.a_modes + partition.b_modes)
    a_tot = perm.T @ direct_sum(ch_a.a, ch_b.a) @ perm
    g_tot = perm.T @ direct_sum(ch_a.g, ch_b.g) @ perm
    out = a_tot @ gamma @ a_tot.T + g_tot
    return bool(np.max(np.abs(out - gamma_prime)) <= tol)
