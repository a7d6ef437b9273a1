"""Truncated number-basis backend for brute-force cross checks.

States live on ``modes`` oscillators, each truncated to ``cutoff`` levels;
pure states are dense complex amplitude tensors of shape (cutoff,)*modes and
mixed states dense matrices of dimension cutoff**modes.  Tensor index order
matches mode order (mode 0 is the leftmost factor).  Truncated constructions
renormalize and keep the discarded tail mass on the object.

Everything here is deliberately direct: dense operators, matrix
exponentials, eigen- and singular-value decompositions.  It exists to check
the closed-form phase-space layer against machinery that shares none of its
code paths.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import InfeasibleError, PhysicalityError
from .states import GaussianState, ModePartition
from .symplectic import (
    euler_decomposition,
    symplectic_eigenvalues,
    symplectic_inverse,
    unitary_from_passive,
    williamson,
)

__all__ = [
    "FockVector",
    "FockDensity",
    "vacuum_fock",
    "number_state",
    "two_mode_squeezed_fock",
    "annihilation",
    "quadrature_ops",
    "beam_splitter_fock",
    "squeezer_fock",
    "weyl_fock",
    "displacement_fock",
    "hamiltonian_fock",
    "gaussian_unitary_fock",
    "passive_fock",
    "apply_unitary",
    "partial_trace",
    "partial_transpose_fock",
    "trace_norm",
    "von_neumann_entropy",
    "log_negativity_fock",
    "mean_energy_fock",
    "fock_covariance",
    "state_fidelity",
    "boundary_mass",
    "project_vacuum_fock",
    "gaussian_to_fock",
    "gaussian_density_fock",
    "ContinuityPoint",
    "continuity_demo",
]


@dataclass(frozen=True)
class FockVector:
    """Pure state amplitudes with the truncation tail that was dropped."""

    amps: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        object.__setattr__(self, "amps", amps)

    @property
    def modes(self) -> int:
        return self.amps.ndim

    @property
    def cutoff(self) -> int:
        return self.amps.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def density(self) -> "FockDensity":
        flat = self.amps.ravel()
        return FockDensity(np.outer(flat, flat.conj()), self.modes, self.cutoff, self.tail)


@dataclass(frozen=True)
class FockDensity:
    """Dense density matrix over modes truncated oscillators."""

    mat: np.ndarray
    modes: int
    cutoff: int
    tail: float = 0.0

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        dim = self.cutoff ** self.modes
        if mat.shape != (dim, dim):
            raise ValueError("density matrix has wrong dimension for (modes, cutoff)")
        object.__setattr__(self, "mat", mat)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.mat)))


def vacuum_fock(modes: int, cutoff: int) -> FockVector:
    amps = np.zeros((cutoff,) * modes, dtype=complex)
    amps[(0,) * modes] = 1.0
    return FockVector(amps)


def number_state(ns, cutoff: int) -> FockVector:
    ns = tuple(int(k) for k in np.atleast_1d(ns))
    if any(k >= cutoff or k < 0 for k in ns):
        raise ValueError("occupation exceeds the cutoff")
    amps = np.zeros((cutoff,) * len(ns), dtype=complex)
    amps[ns] = 1.0
    return FockVector(amps)


def two_mode_squeezed_fock(r: float, cutoff: int) -> FockVector:
    """Two-mode squeezed state with amplitudes ~ tanh(r)^n on |n, n>.

    The base of the geometric law is tanh(r), the convention pinned by the
    requirement that the state's covariance matrix carries cosh(2r) /
    sinh(2r) entries.  The state is renormalized after truncation; a tail
    above 1e-6 triggers a warning.
    """
    if r < 0:
        raise ValueError("squeezing parameter must be non-negative")
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    lam = np.tanh(r)
    coeffs = lam ** np.arange(cutoff) / np.cosh(r)
    tail = 1.0 - float(np.sum(coeffs ** 2))
    if tail > 1e-6:
        warnings.warn(
            f"two-mode squeezed state at r={r} keeps tail mass {tail:.2e} beyond cutoff {cutoff}",
            stacklevel=2,
        )
    amps = np.zeros((cutoff, cutoff), dtype=complex)
    np.fill_diagonal(amps, coeffs)
    amps = amps / np.linalg.norm(amps)
    return FockVector(amps, max(tail, 0.0))


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)


def _embed(op: np.ndarray, mode: int, modes: int, cutoff: int) -> np.ndarray:
    factors = [np.eye(cutoff, dtype=complex)] * modes
    factors[mode] = op
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def quadrature_ops(modes: int, cutoff: int) -> "list[np.ndarray]":
    """Canonical operators (X1, P1, ..., Xn, Pn) as dense matrices."""
    a = annihilation(cutoff)
    x = (a + a.conj().T) / np.sqrt(2.0)
    p = -1j * (a - a.conj().T) / np.sqrt(2.0)
    ops = []
    for m in range(modes):
        ops.append(_embed(x, m, modes, cutoff))
        ops.append(_embed(p, m, modes, cutoff))
    return ops


def beam_splitter_fock(t: complex, r: complex, cutoff: int) -> np.ndarray:
    """Two-mode beam-splitter unitary in the product number basis.

    Built as T^{n1} exp(-conj(R) a2+ a1) exp(R a2 a1+) T^{-n2}.  Photon
    number is conserved, so every total-occupation sector below the cutoff
    is represented exactly and the operator is exactly unitary there;
    incomplete sectors at and above the cutoff are zeroed out (amplitudes
    reaching them are dropped rather than amplified by the T^{-n2} factor).
    """
    t, r = complex(t), complex(r)
    if abs(abs(t) ** 2 + abs(r) ** 2 - 1.0) > 1e-10:
        raise ValueError("|T|^2 + |R|^2 must equal 1")
    if abs(t) < 1e-12:
        raise ValueError("fully reflecting splitter is outside this parametrization")
    a = annihilation(cutoff)
    eye = np.eye(cutoff, dtype=complex)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    occ = np.arange(cutoff, dtype=complex)
    t_pow_n1 = np.diag(np.kron(t ** occ, np.ones(cutoff, dtype=complex)))
    t_pow_mn2 = np.diag(np.kron(np.ones(cutoff, dtype=complex), t ** (-occ)))
    lower = expm(-np.conj(r) * a2.conj().T @ a1)
    raise_ = expm(r * a2 @ a1.conj().T)
    u = t_pow_n1 @ lower @ raise_ @ t_pow_mn2
    totals = np.add.outer(np.arange(cutoff), np.arange(cutoff)).ravel()
    bad = totals >= cutoff
    u[bad, :] = 0.0
    u[:, bad] = 0.0
    return u


def squeezer_fock(r: float, cutoff: int) -> np.ndarray:
    """Single-mode squeezer with X variance e^{2r} on the vacuum."""
    a = annihilation(cutoff)
    gen = 0.5 * r * (a.conj().T @ a.conj().T - a @ a)
    return expm(gen)


def weyl_fock(xi, cutoff: int) -> np.ndarray:
    """Weyl operator exp(i xi^T sigma O) on modes = len(xi)/2 oscillators.

    Factorizes over modes, so it is assembled from single-mode exponentials.
    """
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.shape[0] % 2:
        raise ValueError("phase-space vector must have even length")
    modes = xi.shape[0] // 2
    a = annihilation(cutoff)
    x = (a + a.conj().T) / np.sqrt(2.0)
    p = -1j * (a - a.conj().T) / np.sqrt(2.0)
    out = None
    for m in range(modes):
        gen = 1j * (xi[2 * m] * p - xi[2 * m + 1] * x)
        factor = expm(gen)
        out = factor if out is None else np.kron(out, factor)
    return out


def displacement_fock(d, cutoff: int) -> np.ndarray:
    """Operator displacing the vacuum to first moments d (Weyl at -d)."""
    return weyl_fock(-np.asarray(d, dtype=float), cutoff)


def hamiltonian_fock(g: np.ndarray, modes: int, cutoff: int) -> np.ndarray:
    """Quadratic Hamiltonian (1/2) sum g_jk (O_j O_k + O_k O_j) as a matrix."""
    g = np.asarray(g, dtype=float)
    if g.shape != (2 * modes, 2 * modes):
        raise ValueError("coupling matrix does not match the mode count")
    ops = quadrature_ops(modes, cutoff)
    dim = cutoff ** modes
    h = np.zeros((dim, dim), dtype=complex)
    for j in range(2 * modes):
        for k in range(2 * modes):
            if g[j, k] != 0.0:
                h += 0.5 * g[j, k] * (ops[j] @ ops[k] + ops[k] @ ops[j])
    return h


def gaussian_unitary_fock(g: np.ndarray, t: float, modes: int, cutoff: int) -> np.ndarray:
    """exp(-i t G) for the quadratic Hamiltonian with coefficients g.

    First moments of states evolved by this unitary transform with
    ``symplectic_from_hamiltonian(g, t)``.
    """
    return expm(-1j * t * hamiltonian_fock(g, modes, cutoff))


def passive_fock(u: np.ndarray, cutoff: int) -> np.ndarray:
    """Number-conserving unitary realizing the mode mixing a -> u a.

    The quadratic generator preserves total occupation, so the exponential
    is taken sector by sector (much cheaper than one dense exponential).
    """
    u = np.asarray(u, dtype=complex)
    modes = u.shape[0]
    evals, evecs = np.linalg.eig(u)
    h_small = evecs @ np.diag(-1j * np.log(evals)) @ np.linalg.inv(evecs)
    h_small = 0.5 * (h_small + h_small.conj().T)
    a_ops = [_embed(annihilation(cutoff), m, modes, cutoff) for m in range(modes)]
    dim = cutoff ** modes
    big = np.zeros((dim, dim), dtype=complex)
    for j in range(modes):
        for k in range(modes):
            if h_small[j, k] != 0:
                big += h_small[j, k] * a_ops[j].conj().T @ a_ops[k]
    totals = np.zeros(dim, dtype=int)
    for m in range(modes):
        totals += np.repeat(
            np.tile(np.arange(cutoff), cutoff ** m), cutoff ** (modes - 1 - m)
        )
    out = np.zeros((dim, dim), dtype=complex)
    for n_tot in range(int(totals.max()) + 1):
        idx = np.nonzero(totals == n_tot)[0]
        block = big[np.ix_(idx, idx)]
        vals, vecs = np.linalg.eigh(block)
        out[np.ix_(idx, idx)] = vecs @ np.diag(np.exp(1j * vals)) @ vecs.conj().T
    return out


def apply_unitary(vec: FockVector, op: np.ndarray, modes) -> FockVector:
    """Apply an operator acting on the listed modes to a pure state."""
    modes = [int(m) for m in np.atleast_1d(modes)]
    d = vec.cutoff
    k = len(modes)
    if op.shape != (d ** k, d ** k):
        raise ValueError("operator does not match the listed modes")
    src = vec.amps
    perm = modes + [m for m in range(vec.modes) if m not in modes]
    moved = np.moveaxis(src, perm, range(vec.modes))
    flat = moved.reshape(d ** k, -1)
    flat = op @ flat
    moved = flat.reshape((d,) * vec.modes)
    out = np.moveaxis(moved, range(vec.modes), perm)
    return FockVector(out, vec.tail)


def partial_trace(rho: FockDensity, keep) -> FockDensity:
    """Trace out all modes not listed in ``keep`` (order preserved)."""
    keep = [int(m) for m in np.atleast_1d(keep)]
    if sorted(set(keep)) != sorted(keep) or any(m < 0 or m >= rho.modes for m in keep):
        raise ValueError("keep must list distinct valid modes")
    d = rho.cutoff
    remaining = rho.modes
    tensor = rho.mat.reshape((d,) * (2 * rho.modes))
    for i in sorted((m for m in range(rho.modes) if m not in keep), reverse=True):
        tensor = np.trace(tensor, axis1=i, axis2=i + remaining)
        remaining -= 1
    # axes now follow the original mode order restricted to keep
    k = len(keep)
    pos = [sorted(keep).index(m) for m in keep]
    tensor = np.transpose(tensor, pos + [p + k for p in pos])
    dim = d ** k
    return FockDensity(tensor.reshape(dim, dim), k, d, rho.tail)


def partial_transpose_fock(rho: FockDensity, partition: ModePartition) -> np.ndarray:
    """Transpose the party-B indices of a density matrix."""
    if partition.n != rho.modes:
        raise ValueError("partition does not match the mode count")
    d, m = rho.cutoff, rho.modes
    tensor = rho.mat.reshape((d,) * (2 * m))
    for b in partition.b_modes:
        tensor = np.swapaxes(tensor, b, b + m)
    dim = d ** m
    return tensor.reshape(dim, dim)


def trace_norm(mat: np.ndarray) -> float:
    """Sum of singular values; uses the eigenvalues when Hermitian."""
    mat = np.asarray(mat)
    if np.max(np.abs(mat - mat.conj().T)) <= 1e-12 * max(1.0, float(np.max(np.abs(mat)))):
        return float(np.sum(np.abs(np.linalg.eigvalsh(mat))))
    return float(np.sum(np.linalg.svd(mat, compute_uv=False)))


def _check_density(rho: FockDensity, tol: float = 1e-8) -> None:
    if np.max(np.abs(rho.mat - rho.mat.conj().T)) > tol * max(1.0, float(np.max(np.abs(rho.mat)))):
        raise PhysicalityError("density matrix must be Hermitian")


def von_neumann_entropy(rho: FockDensity) -> float:
    """Base-2 entropy of a (normalized) density matrix."""
    _check_density(rho)
    vals = np.linalg.eigvalsh(rho.mat)
    vals = vals[vals > 1e-14]
    return float(-np.sum(vals * np.log2(vals)))


def log_negativity_fock(state, partition: ModePartition) -> float:
    """log2 of the trace norm of the partial transpose.

    Accepts a pure :class:`FockVector` or a :class:`FockDensity`; the input
    is normalized before the transpose so conditional states can be passed
    directly.
    """
    rho = state.density() if isinstance(state, FockVector) else state
    _check_density(rho)
    tr = rho.trace
    if tr <= 0:
        raise PhysicalityError("density matrix has non-positive trace")
    pt = partial_transpose_fock(rho, partition) / tr
    return float(np.log2(trace_norm(pt)))


def mean_energy_fock(state, weights=None) -> float:
    """Weighted sum of mean occupation numbers over the modes."""
    rho = state.density() if isinstance(state, FockVector) else state
    d, m = rho.cutoff, rho.modes
    if weights is None:
        weights = np.ones(m)
    weights = np.asarray(weights, dtype=float)
    if weights.shape[0] != m:
        raise ValueError("one weight per mode is required")
    diag = np.real(np.diag(rho.mat)).reshape((d,) * m) / rho.trace
    total = 0.0
    for mode in range(m):
        axes = tuple(i for i in range(m) if i != mode)
        marginal = diag.sum(axis=axes) if axes else diag
        total += weights[mode] * float(np.sum(np.arange(d) * marginal))
    return total


def fock_covariance(state) -> "tuple[np.ndarray, np.ndarray]":
    """Covariance matrix and displacement measured in the number basis."""
    if isinstance(state, FockVector):
        d, m = state.cutoff, state.modes
        ops = quadrature_ops(m, d)
        psi = state.amps.ravel()
        psi = psi / np.linalg.norm(psi)
        vs = [op @ psi for op in ops]
        disp = np.array([np.real(np.vdot(psi, v)) for v in vs])
        gamma = np.empty((2 * m, 2 * m))
        for j in range(2 * m):
            for k in range(j, 2 * m):
                sym = np.real(np.vdot(vs[j], vs[k]))
                gamma[j, k] = gamma[k, j] = 2.0 * (sym - disp[j] * disp[k])
        return gamma, disp
    rho = state
    _check_density(rho)
    mat = rho.mat / rho.trace
    ops = quadrature_ops(rho.modes, rho.cutoff)
    prods = [mat @ op for op in ops]
    disp = np.array([np.real(np.trace(p)) for p in prods])
    m2 = rho.modes
    gamma = np.empty((2 * m2, 2 * m2))
    for j in range(2 * m2):
        for k in range(j, 2 * m2):
            val = np.real(np.trace(prods[j] @ ops[k]) + np.trace(prods[k] @ ops[j]))
            gamma[j, k] = gamma[k, j] = val - 2.0 * disp[j] * disp[k]
    return gamma, disp


def state_fidelity(rho: FockDensity, sigma: FockDensity) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of two densities."""
    _check_density(rho)
    _check_density(sigma)
    a = rho.mat / rho.trace
    b = sigma.mat / sigma.trace
    vals, vecs = np.linalg.eigh(a)
    vals = np.clip(vals, 0.0, None)
    root = vecs @ np.diag(np.sqrt(vals)) @ vecs.conj().T
    inner = root @ b @ root
    ivals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(ivals)) ** 2)


def boundary_mass(state) -> float:
    """Population sitting on the topmost level of any mode (truncation stress)."""
    rho = state.density() if isinstance(state, FockVector) else state
    d, m = rho.cutoff, rho.modes
    diag = np.real(np.diag(rho.mat)).reshape((d,) * m)
    mask = np.zeros((d,) * m, dtype=bool)
    for mode in range(m):
        idx = [slice(None)] * m
        idx[mode] = d - 1
        mask[tuple(idx)] = True
    return float(diag[mask].sum())


def project_vacuum_fock(vec: FockVector, mode: int) -> "tuple[FockVector, float]":
    """Project one mode of a pure state onto the vacuum.

    Returns the normalized conditional state on the remaining modes and the
    success probability.
    """
    if not 0 <= mode < vec.modes:
        raise ValueError("mode index out of range")
    sub = np.take(vec.amps, 0, axis=mode)
    p = float(np.sum(np.abs(sub) ** 2))
    if p <= 0:
        raise InfeasibleError("vacuum outcome has zero probability")
    return FockVector(sub / np.sqrt(p), vec.tail), p


def gaussian_to_fock(state: GaussianState, cutoff: int, purity_tol: float = 1e-6) -> FockVector:
    """Number-basis amplitudes of a pure Gaussian state.

    The state is prepared by factoring cov^(1/2) into passive / squeezing /
    passive layers, applying the corresponding truncated unitaries to the
    vacuum, and displacing.  The boundary occupation is reported as the tail.
    """
    nus = symplectic_eigenvalues(state.cov)
    if np.max(np.abs(nus - 1.0)) > purity_tol:
        raise InfeasibleError("number-basis amplitudes are built only for pure states")
    vals, vecs = np.linalg.eigh(0.5 * (state.cov + state.cov.T))
    root = vecs @ np.diag(np.sqrt(vals)) @ vecs.T
    vec = _apply_symplectic_fock(vacuum_fock(state.n, cutoff), root)
    if np.any(state.disp != 0.0):
        vec = FockVector(
            (displacement_fock(state.disp, cutoff) @ vec.amps.ravel()).reshape(vec.amps.shape),
            vec.tail,
        )
    tail = boundary_mass(vec)
    if tail > 1e-3:
        raise InfeasibleError(f"cutoff {cutoff} keeps boundary mass {tail:.2e}")
    amps = vec.amps / np.linalg.norm(vec.amps)
    return FockVector(amps, tail)


def _apply_symplectic_fock(vec: FockVector, s: np.ndarray) -> FockVector:
    """Apply the Gaussian unitary of a symplectic matrix to a pure state."""
    k, d, l = euler_decomposition(s)
    cutoff = vec.cutoff
    u_l = passive_fock(unitary_from_passive(l), cutoff)
    out = FockVector((u_l @ vec.amps.ravel()).reshape(vec.amps.shape), vec.tail)
    for mode_idx, dj in enumerate(d):
        if abs(dj - 1.0) > 1e-14:
            out = apply_unitary(out, squeezer_fock(np.log(dj), cutoff), [mode_idx])
    u_k = passive_fock(unitary_from_passive(k), cutoff)
    out = FockVector((u_k @ out.amps.ravel()).reshape(out.amps.shape), out.tail)
    return out


def gaussian_density_fock(state: GaussianState, cutoff: int) -> FockDensity:
    """Number-basis density matrix of an arbitrary valid Gaussian state.

    Thermal core from the symplectic spectrum, then the Gaussian unitary of
    the diagonalizing symplectic, then the displacement.  Symplectic
    eigenvalues marginally below 1 (truncation noise in measured moments)
    are clipped to 1.
    """
    s_w, nus = williamson(state.cov)
    nus = np.clip(nus, 1.0, None)
    n, d = state.n, cutoff
    weights = []
    for nu in nus:
        nbar = (nu - 1.0) / 2.0
        mu = nbar / (nbar + 1.0) if nbar > 0 else 0.0
        w = (1.0 - mu) * mu ** np.arange(d)
        weights.append(w / np.sum(w))
    diag = weights[0]
    for w in weights[1:]:
        diag = np.kron(diag, w)
    rho = np.diag(diag.astype(complex))
    s_build = symplectic_inverse(s_w)
    k, dvec, l = euler_decomposition(s_build)
    u = passive_fock(unitary_from_passive(k), d)
    mid = None
    for mode_idx, dj in enumerate(dvec):
        sq = squeezer_fock(np.log(dj), d) if abs(dj - 1.0) > 1e-14 else np.eye(d, dtype=complex)
        mid = sq if mid is None else np.kron(mid, sq)
    u = u @ mid @ passive_fock(unitary_from_passive(l), d)
    if np.any(state.disp != 0.0):
        u = displacement_fock(state.disp, d) @ u
    rho = u @ rho @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    out = FockDensity(rho, n, d)
    return FockDensity(rho / out.trace, n, d, boundary_mass(out))


@dataclass(frozen=True)
class ContinuityPoint:
    """Closed-form values of the truncation-free discontinuity sequence."""

    k: int
    trace_distance: float
    entanglement: float
    mean_energy: float


def continuity_demo(k: int) -> ContinuityPoint:
    """Exact values for the k-th member of the discontinuity sequence.

    The state mixes a product term of weight 1 - eps with k equally weighted
    Schmidt terms, eps = 1 / log(k)^2 (natural logarithm).  Reported are the
    pure-state trace distance to the product term, 2*sqrt(eps); the base-2
    entropy of the Schmidt vector ((1-eps), eps/k, ..., eps/k); and the mean
    occupation sum_{n=1..k} n * eps / k.  All in closed form, no truncation.

    Raises:
        ValueError: for k < 3, where eps >= 1 and no such state exists.
    """
    k = int(k)
    if k < 3:
        raise ValueError("sequence index must be at least 3 (eps must stay below 1)")
    eps = 1.0 / np.log(k) ** 2
    trace_distance = 2.0 * np.sqrt(eps)
    entanglement = -(1.0 - eps) * np.log2(1.0 - eps) - eps * np.log2(eps / k)
    mean_energy = eps * (k + 1.0) / 2.0
    return ContinuityPoint(k, float(trace_distance), float(entanglement), float(mean_energy))
