"""Composite entanglement-manipulation procedures.

Three families live here: the two-copy Gaussian measure-and-postprocess
template (whose inability to raise entanglement is checked by Monte Carlo),
the minimal non-Gaussian distillation pipeline (click heralding followed by
iterated vacuum-conditioned mixing), and entanglement generation by passive
transformations with its two-smallest-eigenvalues bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channels import homodyne_condition
from .entanglement import ModePartition, log_negativity_gaussian
from .errors import InfeasibleError
from .fock import (
    FockDensity,
    beam_splitter_fock,
    boundary_mass,
    fock_covariance,
    gaussian_density_fock,
    log_negativity_fock,
    trace_norm,
    two_mode_squeezed_fock,
)
from .states import GaussianState, require_valid
from .symplectic import (
    direct_sum,
    is_passive,
    mode_permutation,
    passive_from_unitary,
    random_quadratic_coupling,
    symplectic_from_hamiltonian,
)

__all__ = [
    "GaussianLoccProtocol",
    "random_protocol",
    "gaussian_locc_step",
    "NoGoResult",
    "no_go_monte_carlo",
    "nongaussian_first_step",
    "gaussify_step",
    "gaussianity_distance",
    "DistillationRecord",
    "distill_pipeline",
    "passive_max_entanglement",
    "passive_optimizer",
    "OptimizerResult",
]

_AB = ModePartition.from_string("AB")


@dataclass(frozen=True)
class GaussianLoccProtocol:
    """One round of the two-copy Gaussian measure-and-postprocess template.

    ``s_a`` and ``s_b`` are 4x4 symplectics acting on (A1, A2) and (B1, B2);
    modes A2 and B2 are then homodyned along ``quad_a`` / ``quad_b``, and the
    2x2 symplectics ``post_a`` / ``post_b`` act on the surviving modes.
    """

    s_a: np.ndarray
    s_b: np.ndarray
    quad_a: str = "X"
    quad_b: str = "X"
    post_a: np.ndarray = None
    post_b: np.ndarray = None

    def __post_init__(self):
        s_a = np.array(self.s_a, dtype=float)
        s_b = np.array(self.s_b, dtype=float)
        post_a = np.eye(2) if self.post_a is None else np.array(self.post_a, dtype=float)
        post_b = np.eye(2) if self.post_b is None else np.array(self.post_b, dtype=float)
        if s_a.shape != (4, 4) or s_b.shape != (4, 4):
            raise ValueError("party symplectics must be 4x4")
        if post_a.shape != (2, 2) or post_b.shape != (2, 2):
            raise ValueError("post-processing symplectics must be 2x2")
        for name, mat in (("s_a", s_a), ("s_b", s_b), ("post_a", post_a), ("post_b", post_b)):
            form = np.array([[0.0, 1.0], [-1.0, 0.0]])
            dims = mat.shape[0] // 2
            big = np.kron(np.eye(dims), form)
            if np.max(np.abs(mat @ big @ mat.T - big)) > 1e-6:
                raise ValueError(f"{name} is not symplectic")
        if str(self.quad_a).upper() not in ("X", "P") or str(self.quad_b).upper() not in ("X", "P"):
            raise ValueError("measured quadratures must be 'X' or 'P'")
        object.__setattr__(self, "s_a", s_a)
        object.__setattr__(self, "s_b", s_b)
        object.__setattr__(self, "quad_a", str(self.quad_a).upper())
        object.__setattr__(self, "quad_b", str(self.quad_b).upper())
        object.__setattr__(self, "post_a", post_a)
        object.__setattr__(self, "post_b", post_b)


def _rotation(phi: float) -> np.ndarray:
    return np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])


def random_protocol(rng: np.random.Generator) -> GaussianLoccProtocol:
    """Sample one instance of the protocol template.

    Local symplectics come from quadratic couplings with entries uniform in
    [-1, 1] (the full 10-parameter family per side); the measured quadrature
    is X or P with a random extra rotation of the measured mode folded into
    the local symplectic.
    """
    s_a = symplectic_from_hamiltonian(random_quadratic_coupling(2, rng), 1.0)
    s_b = symplectic_from_hamiltonian(random_quadratic_coupling(2, rng), 1.0)
    s_a = direct_sum(np.eye(2), _rotation(rng.uniform(0.0, 2 * np.pi))) @ s_a
    s_b = direct_sum(np.eye(2), _rotation(rng.uniform(0.0, 2 * np.pi))) @ s_b
    post_a = symplectic_from_hamiltonian(random_quadratic_coupling(1, rng), 1.0)
    post_b = symplectic_from_hamiltonian(random_quadratic_coupling(1, rng), 1.0)
    return GaussianLoccProtocol(
        s_a,
        s_b,
        "X" if rng.uniform() < 0.5 else "P",
        "X" if rng.uniform() < 0.5 else "P",
        post_a,
        post_b,
    )


def gaussian_locc_step(gamma_in: np.ndarray, proto: GaussianLoccProtocol) -> np.ndarray:
    """Run one template round on two copies of a two-mode state.

    Builds the four-mode covariance of two copies with mode bookkeeping
    (A1, A2, B1, B2), applies the local symplectics, homodynes A2 and B2,
    and applies the post-processing; returns the two-mode covariance of the
    surviving (A1, B1) pair.
    """
    gamma_in = np.asarray(gamma_in, dtype=float)
    if gamma_in.shape != (4, 4):
        raise ValueError("input must be a two-mode covariance matrix")
    require_valid(gamma_in)
    # copies are (A1, B1) and (A2, B2); regroup to (A1, A2, B1, B2)
    two = direct_sum(gamma_in, gamma_in)
    perm = mode_permutation([0, 2, 1, 3])
    four = perm @ two @ perm.T
    local = direct_sum(proto.s_a, proto.s_b)
    four = local @ four @ local.T
    state = GaussianState(0.5 * (four + four.T))
    state = homodyne_condition(state, 3, proto.quad_b)  # B2
    state = homodyne_condition(state, 1, proto.quad_a)  # A2, now (A1, B1)
    post = direct_sum(proto.post_a, proto.post_b)
    out = post @ state.cov @ post.T
    return 0.5 * (out + out.T)


@dataclass(frozen=True)
class NoGoResult:
    trials: int
    baseline: float
    max_gain: float
    median_gain: float
    best_protocol: GaussianLoccProtocol


def no_go_monte_carlo(gamma_in: np.ndarray, trials: int, seed: int = 0) -> NoGoResult:
    """Random search for an entanglement gain over the protocol template.

    Samples ``trials`` protocols, runs each on two copies of ``gamma_in``,
    and reports the largest and median change in logarithmic negativity
    relative to the input state.  Deterministic for a fixed seed.
    """
    gamma_in = np.asarray(gamma_in, dtype=float)
    if trials < 1:
        raise ValueError("at least one trial is required")
    baseline = log_negativity_gaussian(gamma_in, _AB)
    rng = np.random.default_rng(seed)
    best = None
    best_gain = -np.inf
    gains = np.empty(trials)
    for t in range(trials):
        proto = random_protocol(rng)
        out = gaussian_locc_step(gamma_in, proto)
        gains[t] = log_negativity_gaussian(out, _AB) - baseline
        if gains[t] > best_gain:
            best_gain = gains[t]
            best = proto
    return NoGoResult(trials, baseline, float(np.max(gains)), float(np.median(gains)), best)


def nongaussian_first_step(r: float, v: float, cutoff: int) -> "tuple[FockDensity, float]":
    """Click-heralded non-Gaussian step on a squeezed pair.

    Each party mixes its mode with a fresh vacuum ancilla on a beam
    splitter of amplitude transmissivity ``v``; a yes-no detector on each
    ancilla output must click (Kraus element 1 - |0><0|), and the detected
    modes are traced out.  Returns the normalized, now non-Gaussian,
    two-mode state and the double-click probability.

    Mixing two identical Gaussian copies instead would be idle: equal
    Gaussian inputs leave a beam splitter exactly uncorrelated, so a
    detection on one output arm cannot change the other.  The vacuum
    ancillas are what make the click informative.
    """
    if r <= 0:
        raise ValueError("squeezing parameter must be positive")
    if not 0.0 < v < 1.0:
        raise ValueError("transmissivity must lie strictly between 0 and 1")
    pair = two_mode_squeezed_fock(r, cutoff)
    if pair.tail > 1e-6:
        raise InfeasibleError(f"cutoff {cutoff} keeps tail mass {pair.tail:.2e} > 1e-6")
    d = cutoff
    amps = np.zeros((d, d, d, d), dtype=complex)  # (A, B, anc_A, anc_B)
    amps[:, :, 0, 0] = pair.amps
    u = beam_splitter_fock(v, np.sqrt(1.0 - v * v), d)
    amps = _apply_two_mode(amps, u, 0, 2, d)
    amps = _apply_two_mode(amps, u, 1, 3, d)
    # both detectors click: remove the vacuum component of each ancilla
    amps = amps.copy()
    amps[:, :, 0, :] = 0.0
    amps[:, :, :, 0] = 0.0
    p = float(np.sum(np.abs(amps) ** 2))
    if p <= 0:
        raise InfeasibleError("double click has zero probability at this cutoff")
    flat = amps.reshape(d * d, d * d)
    rho = flat @ flat.conj().T / p
    out = FockDensity(rho, 2, d, pair.tail)
    return FockDensity(rho, 2, d, boundary_mass(out)), p


def _apply_two_mode(amps: np.ndarray, op: np.ndarray, i: int, j: int, d: int) -> np.ndarray:
    """Apply a two-mode operator to axes (i, j) of a pure tensor."""
    m = amps.ndim
    rest = [k for k in range(m) if k not in (i, j)]
    moved = np.transpose(amps, [i, j] + rest)
    flat = moved.reshape(d * d, -1)
    flat = op @ flat
    moved = flat.reshape((d,) * m)
    inverse = np.argsort([i, j] + rest)
    return np.transpose(moved, inverse)


def gaussify_step(rho: FockDensity, rank_tol: float = 1e-13) -> "tuple[FockDensity, float]":
    """One vacuum-conditioned balanced-mixing round.

    Two copies of the two-mode input are mixed pairwise on 50:50 beam
    splitters (one per side), one output mode per side is projected onto
    the vacuum, and the remaining pair is kept.  Returns the normalized
    output and the success probability; the trace of the unnormalized
    output equals that probability.
    """
    if rho.modes != 2:
        raise ValueError("the mixing round is defined for two-mode states")
    d = rho.cutoff
    vals, vecs = np.linalg.eigh(0.5 * (rho.mat + rho.mat.conj().T))
    vals = vals / float(np.sum(vals))
    keep = vals > rank_tol
    vals = vals[keep]
    vecs = vecs[:, keep]
    u = beam_splitter_fock(1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0), d)
    # row slice of U with the second output mode in the vacuum
    k_slice = u.reshape(d, d, d * d)[:, 0, :]  # (out1, in-pair)
    chis = [vecs[:, i].reshape(d, d) for i in range(vecs.shape[1])]
    # T_i[x, c, b] = sum_a K[x, (a, c)] chi_i[a, b]
    k_tensor = k_slice.reshape(d, d, d)  # (x, a, c)
    t_list = [np.einsum("xac,ab->xcb", k_tensor, chi) for chi in chis]
    # same splitter on the B side; W_j[c, b, y] = sum_d chi_j[c, d] K[y, (b, d)]
    w_list = [np.einsum("cd,ybd->cby", chi, k_tensor) for chi in chis]
    rank = len(chis)
    rows = []
    weights = []
    for i in range(rank):
        ti = t_list[i].reshape(d, d * d)
        for j in range(rank):
            wj = w_list[j].reshape(d * d, d)
            psi = ti @ wj
            rows.append(psi.ravel())
            weights.append(vals[i] * vals[j])
    q = np.asarray(rows) * np.sqrt(np.asarray(weights))[:, None]
    rho_out = (q.conj().T @ q).T
    p = float(np.real(np.trace(rho_out)))
    if p <= 0:
        raise InfeasibleError("vacuum outcome has zero probability")
    rho_out = 0.5 * (rho_out + rho_out.conj().T) / p
    out = FockDensity(rho_out, 2, d)
    return FockDensity(rho_out, 2, d, boundary_mass(out)), p


def gaussianity_distance(rho: FockDensity) -> float:
    """Trace distance to the Gaussian state with the same first and second moments.

    The reference is built at the same cutoff, so the distance is measured
    within the truncated space; the value is half the trace norm of the
    difference, in [0, 1].
    """
    gamma, disp = fock_covariance(rho)
    ref = gaussian_density_fock(GaussianState(0.5 * (gamma + gamma.T), disp), rho.cutoff)
    return 0.5 * trace_norm(rho.mat / rho.trace - ref.mat)


@dataclass(frozen=True)
class DistillationRecord:
    """Per-round snapshot of the distillation pipeline."""

    step: int
    log_negativity: float
    success_probability: float
    cumulative_probability: float
    gaussianity_distance: float
    tail_mass: float


def distill_pipeline(r: float, v: float, iterations: int, cutoff: int) -> "list[DistillationRecord]":
    """Heralded first step followed by repeated vacuum-conditioned mixing.

    Record 0 describes the state after the non-Gaussian step; each further
    record follows one mixing round.  Success probabilities multiply along
    the chain.
    """
    if iterations < 0:
        raise ValueError("iteration count must be non-negative")
    rho, p = nongaussian_first_step(r, v, cutoff)
    records = [
        DistillationRecord(
            0,
            log_negativity_fock(rho, _AB),
            p,
            p,
            gaussianity_distance(rho),
            rho.tail,
        )
    ]
    cum = p
    for it in range(1, iterations + 1):
        rho, p = gaussify_step(rho)
        cum *= p
        records.append(
            DistillationRecord(
                it,
                log_negativity_fock(rho, _AB),
                p,
                cum,
                gaussianity_distance(rho),
                rho.tail,
            )
        )
    return records


def passive_max_entanglement(gamma: np.ndarray) -> float:
    """Largest negativity any passive transformation can concentrate in a pair.

    Equals max(0, -log2(l1 * l2) / 2) with l1, l2 the two smallest
    eigenvalues of the covariance matrix; zero whenever no eigenvalue drops
    below 1 (unsqueezed inputs cannot be entangled passively).
    """
    gamma = np.asarray(gamma, dtype=float)
    require_valid(gamma)
    if gamma.shape[0] < 4:
        raise ValueError("at least two modes are required")
    eigs = np.sort(np.linalg.eigvalsh(gamma))
    return float(max(0.0, -0.5 * np.log2(eigs[0] * eigs[1])))


@dataclass(frozen=True)
class OptimizerResult:
    k: np.ndarray
    achieved: float
    mode_pair: tuple


def _pair_negativity(gamma: np.ndarray, i: int, j: int) -> float:
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    sub = gamma[np.ix_(idx, idx)]
    # inline 1x1 negativity: symplectic spectrum of the momentum-flipped block
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    gt = flip @ sub @ flip
    form = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    nus = np.sort(np.abs(np.linalg.eigvals(form @ gt)))[::-1][0::2]
    nus = np.clip(nus, 1e-12, None)
    return float(np.sum(np.maximum(0.0, -np.log2(nus))))


def _hermitian_from_params(x: np.ndarray, n: int) -> np.ndarray:
    h = np.zeros((n, n), dtype=complex)
    pos = 0
    for i in range(n):
        h[i, i] = x[pos]
        pos += 1
    for i in range(n):
        for j in range(i + 1, n):
            h[i, j] = x[pos] + 1j * x[pos + 1]
            h[j, i] = x[pos] - 1j * x[pos + 1]
            pos += 2
    return h


def passive_optimizer(gamma: np.ndarray, restarts: int = 6, seed: int = 0) -> OptimizerResult:
    """Search the passive group for the most entangling transformation.

    Parametrizes passive matrices through unitaries exp(iH) and maximizes,
    with derivative-free restarts, the negativity of the best two-mode
    reduction of K gamma K^T.  Deterministic per seed; only the achieved
    value is contractual, not the optimizer path.
    """
    gamma = np.asarray(gamma, dtype=float)
    require_valid(gamma)
    n = gamma.shape[0] // 2
    if n < 2:
        raise ValueError("at least two modes are required")
    rng = np.random.default_rng(seed)
    n_params = n * n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def build(x):
        h = _hermitian_from_params(np.asarray(x), n)
        vals, vecs = np.linalg.eigh(h)
        u = vecs @ np.diag(np.exp(1j * vals)) @ vecs.conj().T
        return passive_from_unitary(u)

    def score(x):
        k = build(x)
        g2 = k @ gamma @ k.T
        return max(_pair_negativity(g2, i, j) for i, j in pairs)

    best_x, best_val = None, -1.0
    for start in range(restarts):
        x0 = rng.uniform(-np.pi, np.pi, n_params) if start else np.zeros(n_params)
        res = minimize(lambda x: -score(x), x0, method="Powell", options={"maxiter": 4000, "xtol": 1e-10, "ftol": 1e-12})
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x
    k = build(best_x)
    if not is_passive(k, tol=1e-8):
        raise RuntimeError("optimizer produced a non-passive matrix")
    g2 = k @ gamma @ k.T
    pair_scores = [(_pair_negativity(g2, i, j), (i, j)) for i, j in pairs]
    achieved, pair = max(pair_scores)
    return OptimizerResult(k, float(achieved), pair)
