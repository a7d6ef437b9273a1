"""Entanglement criteria, measures, and normal forms on covariance matrices.

Bipartitions are described by a :class:`~cvgauss.states.ModePartition`; the
momentum-reversal criterion flips the P coordinate of every party-B mode.
Logarithmic negativity is base-2 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .states import ModePartition, require_valid, validate_covariance, TOL_PSD
from .symplectic import (
    direct_sum,
    hermitian_min_eig,
    mode_permutation,
    passive_from_unitary,
    symplectic_eigenvalues,
    symplectic_form,
    williamson,
)

__all__ = [
    "PPTReport",
    "SchmidtForm",
    "SimonForm",
    "momentum_flip",
    "partial_transpose_cov",
    "ppt_verdict",
    "log_negativity_gaussian",
    "separability_witness_verify",
    "schmidt_normal_form",
    "simon_normal_form",
    "entropy_of_entanglement_pure",
    "glocc_convertible",
    "locc_convertible_pure",
    "tms_schmidt_spectrum",
    "glocc_vs_locc_gap",
]

#: purity threshold on symplectic eigenvalues for pure-state normal forms
PURITY_TOL = 1e-6


@dataclass(frozen=True)
class PPTReport:
    """Verdict of the momentum-reversal (PPT) test."""

    verdict: str  # "NPT_Entangled" or "PPT"
    min_eigenvalue: float
    conclusive: bool
    note: str

    @property
    def entangled(self) -> bool:
        return self.verdict == "NPT_Entangled"


@dataclass(frozen=True)
class SchmidtForm:
    """Local symplectics and squeezing vector of a pure-state normal form."""

    s_a: np.ndarray
    s_b: np.ndarray
    r: np.ndarray  # descending, one entry per mode pair


@dataclass(frozen=True)
class SimonForm:
    """Two-mode standard form (x1, x2, x3, x4) and the local symplectics."""

    s_a: np.ndarray
    s_b: np.ndarray
    x: tuple


def momentum_flip(partition: ModePartition) -> np.ndarray:
    """Diagonal matrix reversing the momentum of every party-B mode."""
    signs = np.ones(2 * partition.n)
    for m in partition.b_modes:
        signs[2 * m + 1] = -1.0
    return np.diag(signs)


def partial_transpose_cov(gamma: np.ndarray, partition: ModePartition) -> np.ndarray:
    """Second moments of the partially transposed state: F gamma F.

    An involution; the output is symmetric but generally no longer a valid
    covariance matrix, which is the content of the entanglement criterion.
    Only structural checks are applied here so that the involution can be
    evaluated on the (possibly unphysical) flipped matrix itself; physical
    validity of the input is enforced by the criterion functions.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape != (2 * partition.n, 2 * partition.n):
        raise ValueError("partition does not match the covariance dimension")
    if np.max(np.abs(gamma - gamma.T)) > 1e-8 * max(1.0, float(np.max(np.abs(gamma)))):
        raise ValueError("covariance matrix must be symmetric")
    f = momentum_flip(partition)
    return f @ gamma @ f


def ppt_verdict(gamma: np.ndarray, partition: ModePartition, tol_psd: float = TOL_PSD) -> PPTReport:
    """Momentum-reversal separability test.

    NPT_Entangled iff ``F gamma F + i sigma`` has an eigenvalue below
    ``-tol_psd``.  The report notes whether a PPT outcome is conclusive for
    separability (it is exactly when one party holds a single mode).
    """
    require_valid(gamma)
    gt = partial_transpose_cov(gamma, partition)
    n = partition.n
    min_eig = hermitian_min_eig(gt, symplectic_form(n))
    npt = min_eig < -tol_psd
    conclusive = min(partition.n_a, partition.n_b) == 1
    if npt:
        note = "partial transpose violates the uncertainty relation: entangled"
    elif conclusive:
        note = "PPT and one party holds a single mode: separable"
    else:
        note = "PPT but both parties hold >= 2 modes: inconclusive (bound entanglement possible)"
    return PPTReport("NPT_Entangled" if npt else "PPT", min_eig, conclusive, note)


def log_negativity_gaussian(gamma: np.ndarray, partition: ModePartition) -> float:
    """Logarithmic negativity from the symplectic spectrum of F gamma F.

    E_N = sum_k max(0, -log2 nu_k) over the symplectic eigenvalues nu of the
    partially transposed covariance matrix; zero for PPT states and invariant
    under local symplectic transformations.
    """
    require_valid(gamma)
    gt = partial_transpose_cov(gamma, partition)
    nus = symplectic_eigenvalues(gt)
    return float(np.sum(np.maximum(0.0, -np.log2(nus))))


def separability_witness_verify(
    gamma: np.ndarray,
    gamma_a: np.ndarray,
    gamma_b: np.ndarray,
    partition: "ModePartition | None" = None,
    tol: float = TOL_PSD,
) -> bool:
    """Verify a separability certificate gamma >= gamma_a (+) gamma_b.

    True iff both candidate blocks are valid covariance matrices and the
    difference ``gamma - gamma_a (+) gamma_b`` is positive semidefinite
    within ``tol``; a True outcome certifies separability.  When
    ``partition`` is omitted, party A is taken to hold the leading modes.
    """
    gamma = np.asarray(gamma, dtype=float)
    gamma_a = np.asarray(gamma_a, dtype=float)
    gamma_b = np.asarray(gamma_b, dtype=float)
    require_valid(gamma)
    n = gamma.shape[0] // 2
    n_a = gamma_a.shape[0] // 2
    n_b = gamma_b.shape[0] // 2
    if n_a + n_b != n:
        raise ValueError("witness blocks do not add up to the state dimension")
    if partition is None:
        partition = ModePartition.from_counts(n_a, n_b)
    if partition.n_a != n_a or partition.n_b != n_b:
        raise ValueError("witness blocks do not match the partition")
    for block in (gamma_a, gamma_b):
        if not validate_covariance(block, tol).valid:
            return False
    perm = mode_permutation(partition.a_modes + partition.b_modes)
    candidate = perm.T @ direct_sum(gamma_a, gamma_b) @ perm
    diff = gamma - candidate
    return bool(np.linalg.eigvalsh(0.5 * (diff + diff.T))[0] >= -tol)


def _group_indices(values: np.ndarray, tol: float) -> "list[list[int]]":
    groups = []
    for i, v in enumerate(values):
        if groups and abs(values[groups[-1][0]] - v) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _reorthogonalize_passive(k: np.ndarray) -> np.ndarray:
    """Project a nearly orthogonal-symplectic matrix onto the passive group."""
    n = k.shape[0] // 2
    re = 0.5 * (k[0::2, 0::2] + k[1::2, 1::2])
    im = 0.5 * (k[1::2, 0::2] - k[0::2, 1::2])
    u = re + 1j * im
    w, _, vh = np.linalg.svd(u)
    return passive_from_unitary(w @ vh)


def schmidt_normal_form(gamma: np.ndarray, partition: ModePartition) -> SchmidtForm:
    """Reduce a pure n x n state to a direct sum of two-mode squeezed blocks.

    Finds local symplectics S_A, S_B such that, with the modes grouped as
    (A modes in listed order, then B modes), the congruence by S_A (+) S_B
    turns the covariance matrix into cosh/sinh blocks pairing the k-th A
    mode with the k-th B mode (the matrix built by :func:`schmidt_form_cov`).
    Squeezing parameters come out in descending order.

    Raises:
        InfeasibleError: if the state is not pure (symplectic eigenvalues
            away from 1) -- distinct from a validity failure.
        ValueError: if the parties hold different numbers of modes.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape[0] != 2 * partition.n:
        raise ValueError("partition does not match the covariance dimension")
    if partition.n_a != partition.n_b:
        raise ValueError("pure-state normal form needs equally sized parties")
    require_valid(gamma)
    nus_global = symplectic_eigenvalues(gamma)
    if np.max(np.abs(nus_global - 1.0)) > PURITY_TOL:
        raise InfeasibleError(
            "state is not pure: symplectic eigenvalues deviate from 1 by "
            f"{np.max(np.abs(nus_global - 1.0)):.3e}"
        )
    m = partition.n_a
    perm = mode_permutation(partition.a_modes + partition.b_modes)
    g = perm @ gamma @ perm.T
    g_a = g[: 2 * m, : 2 * m]
    g_b = g[2 * m :, 2 * m :]
    s_a, nu_a = williamson(g_a)
    s_b, nu_b = williamson(g_b)
    local = direct_sum(s_a, s_b)
    g2 = local @ g @ local.T
    c = g2[: 2 * m, 2 * m :]
    # per equal-nu group, rotate the B side so the cross block becomes
    # s * diag(1, -1) per pair; purity makes C / s orthogonal on each group
    u_b = np.eye(2 * m)
    for group in _group_indices(nu_a, 1e-7):
        nu = float(np.mean(nu_a[group]))
        if nu <= 1.0 + 1e-10:
            continue
        sl = np.concatenate([[2 * i, 2 * i + 1] for i in group])
        e = c[np.ix_(sl, sl)]
        s_val = np.sqrt(nu ** 2 - 1.0)
        zg = np.diag(np.ravel([(1.0, -1.0)] * len(group)))
        u_b[np.ix_(sl, sl)] = _reorthogonalize_passive(zg @ (e / s_val))
    s_b = u_b @ s_b
    r = 0.5 * np.arccosh(np.clip(nu_a, 1.0, None))
    return SchmidtForm(s_a, s_b, r)


def tms_block(r: float) -> np.ndarray:
    """Four-by-four cosh/sinh block of a two-mode squeezed pair."""
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    return np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )


def schmidt_form_cov(r: np.ndarray, m: int) -> np.ndarray:
    """Normal-form covariance for squeezing vector r on an m x m system.

    Modes are ordered (A_1..A_m, B_1..B_m); pair k couples A_k with B_k.
    """
    r = np.asarray(r, dtype=float)
    out = np.zeros((4 * m, 4 * m))
    for k, rk in enumerate(r):
        block = tms_block(rk)
        ia, ib = 2 * k, 2 * m + 2 * k
        out[ia : ia + 2, ia : ia + 2] = block[:2, :2]
        out[ib : ib + 2, ib : ib + 2] = block[2:, 2:]
        out[ia : ia + 2, ib : ib + 2] = block[:2, 2:]
        out[ib : ib + 2, ia : ia + 2] = block[2:, :2]
    return out


def simon_normal_form(gamma: np.ndarray) -> SimonForm:
    """Standard form of a two-mode covariance matrix under local symplectics.

    Returns S_A, S_B in Sp(2, R) and the invariants (x1, x2, x3, x4) with
    diagonal blocks x1*I, x2*I and off-diagonal block diag(x3, x4); the sign
    ambiguity is fixed by x3 >= |x4|.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (4, 4):
        raise ValueError("standard form is defined for two-mode states")
    require_valid(gamma)
    a = gamma[:2, :2]
    b = gamma[2:, 2:]
    c = gamma[:2, 2:]
    s_a1, nu_a = williamson(a)
    s_b1, nu_b = williamson(b)
    x1, x2 = float(nu_a[0]), float(nu_b[0])
    c1 = s_a1 @ c @ s_b1.T
    u, sv, vh = np.linalg.svd(c1)
    v = vh.T
    du, dv = np.linalg.det(u), np.linalg.det(v)
    rot_a = u @ np.diag([1.0, np.sign(du)])
    rot_b = v @ np.diag([1.0, np.sign(dv)])
    x3 = float(sv[0])
    x4 = float(np.sign(du) * np.sign(dv) * sv[1])
    return SimonForm(rot_a.T @ s_a1, rot_b.T @ s_b1, (x1, x2, x3, x4))


def entropy_of_entanglement_pure(r) -> float:
    """Entropy of entanglement of a product of two-mode squeezed pairs.

    Sums, over the components of ``r``, the base-2 Shannon entropy of the
    geometric Schmidt distribution of each pair; each series is accumulated
    until its tail mass drops below 1e-12.  Additive over components.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise ValueError("squeezing parameters must be non-negative")
    total = 0.0
    for rk in r:
        mu = np.tanh(rk) ** 2
        if mu == 0.0:
            continue
        term = 0.0
        weight = 1.0 - mu
        tail = 1.0
        while tail > 1e-12 and weight > 0.0:
            term -= weight * np.log2(weight)
            tail -= weight
            weight *= mu
        total += term
    return float(total)


def _pad_descending(v, length: int) -> np.ndarray:
    v = np.sort(np.atleast_1d(np.asarray(v, dtype=float)))[::-1]
    if v.shape[0] < length:
        v = np.concatenate([v, np.zeros(length - v.shape[0])])
    return v


def glocc_convertible(r, r_prime) -> bool:
    """Componentwise criterion for pure-state conversion under Gaussian LOCC.

    After padding to equal length and sorting descending, conversion is
    possible iff ``r_k >= r'_k`` for every k.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    rp = np.atleast_1d(np.asarray(r_prime, dtype=float))
    if np.any(r < 0) or np.any(rp < 0):
        raise ValueError("squeezing parameters must be non-negative")
    length = max(r.shape[0], rp.shape[0])
    r = _pad_descending(r, length)
    rp = _pad_descending(rp, length)
    return bool(np.all(r >= rp - 1e-12))


def locc_convertible_pure(alpha, alpha_prime) -> bool:
    """Majorization criterion for pure-state conversion under general LOCC.

    Both arguments must be probability vectors (descending order is enforced
    internally); conversion source -> target is possible iff every leading
    partial sum of the source is bounded by the target's.
    """
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    ap = np.atleast_1d(np.asarray(alpha_prime, dtype=float))
    for v in (a, ap):
        if np.any(v < -1e-12):
            raise ValueError("Schmidt spectra must be non-negative")
        if abs(float(np.sum(v)) - 1.0) > 1e-8:
            raise ValueError("Schmidt spectra must be normalized")
    length = max(a.shape[0], ap.shape[0])
    a = _pad_descending(a, length)
    ap = _pad_descending(ap, length)
    return bool(np.all(np.cumsum(a) <= np.cumsum(ap) + 1e-12))


def tms_schmidt_spectrum(r: float, cutoff: int) -> "tuple[np.ndarray, float]":
    """Truncated geometric Schmidt spectrum of a two-mode squeezed pair.

    Returns the first ``cutoff`` weights (not renormalized) and the exact
    tail mass beyond the truncation.
    """
    if r < 0:
        raise ValueError("squeezing parameter must be non-negative")
    mu = np.tanh(r) ** 2
    weights = (1.0 - mu) * mu ** np.arange(cutoff)
    return weights, float(mu ** cutoff)


@dataclass(frozen=True)
class GapResult:
    glocc: bool
    locc: bool


def glocc_vs_locc_gap(r: float, r_prime: float, cutoff: int = 60) -> GapResult:
    """Compare Gaussian-LOCC and general-LOCC convertibility of rho(r)^2.

    The Gaussian verdict compares (r, r) against (r', 0) componentwise; the
    general verdict applies majorization to the truncated, renormalized
    Schmidt spectra of two copies of the r pair versus a single r' pair.

    Raises:
        InfeasibleError: when the truncated tail mass exceeds 1e-8.
    """
    if r < 0 or r_prime < 0:
        raise ValueError("squeezing parameters must be non-negative")
    glocc = glocc_convertible((r, r), (r_prime, 0.0))
    single, tail_single = tms_schmidt_spectrum(r, cutoff)
    target, tail_target = tms_schmidt_spectrum(r_prime, cutoff)
    source = np.outer(single, single).ravel()
    tail_source = 1.0 - float(np.sum(source))
    if max(tail_source, tail_target) > 1e-8:
        raise InfeasibleError(
            f"cutoff {cutoff} leaves tail mass {max(tail_source, tail_target):.2e} > 1e-8"
        )
    source = source / np.sum(source)
    target = target / np.sum(target)
    locc = locc_convertible_pure(source, target)
    return GapResult(glocc, locc)
