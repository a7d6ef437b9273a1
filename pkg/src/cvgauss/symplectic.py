"""Symplectic linear algebra for systems of canonical mode pairs.

Coordinates are ordered (X1, P1, ..., Xn, Pn) throughout, with hbar = 1 and
the vacuum covariance matrix normalized to the identity.  The antisymmetric
form returned by :func:`symplectic_form` encodes the canonical commutation
relations in this ordering; a real matrix S is symplectic when
``S @ form @ S.T == form``.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm, polar, schur

__all__ = [
    "ATOL",
    "FLOW_CONSTANT",
    "symplectic_form",
    "direct_sum",
    "mode_permutation",
    "hermitian_min_eig",
    "is_symplectic",
    "is_passive",
    "symplectic_from_hamiltonian",
    "symplectic_inverse",
    "passive_from_unitary",
    "unitary_from_passive",
    "random_quadratic_coupling",
    "random_symplectic",
    "random_passive",
    "symplectic_eigenvalues",
    "williamson",
    "euler_decomposition",
    "squeezing_diagonal",
]

#: absolute tolerance for symplectic / orthogonal membership tests
ATOL = 1e-8

#: constant relating a quadratic coefficient matrix g to the linear
#: phase-space flow exp(FLOW_CONSTANT * t * sigma @ g); the value 2 is
#: pinned once by the Fock beam-splitter oracle and must not be changed
#: independently of the photon-number formula in :mod:`cvgauss.states`.
FLOW_CONSTANT = 2.0


def symplectic_form(n: int) -> np.ndarray:
    """Return the 2n x 2n canonical antisymmetric form.

    Args:
        n: number of modes, at least 1.

    Returns:
        Block-diagonal matrix with 2x2 blocks [[0, 1], [-1, 0]].
    """
    if n < 1:
        raise ValueError("mode count must be at least 1")
    out = np.zeros((2 * n, 2 * n))
    for j in range(n):
        out[2 * j, 2 * j + 1] = 1.0
        out[2 * j + 1, 2 * j] = -1.0
    return out


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal direct sum of square matrices."""
    blocks = [np.asarray(b, dtype=float) for b in blocks]
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    pos = 0
    for b in blocks:
        k = b.shape[0]
        out[pos : pos + k, pos : pos + k] = b
        pos += k
    return out


def mode_permutation(new_order: "list[int] | tuple[int, ...]") -> np.ndarray:
    """Permutation matrix P reordering whole modes.

    ``P @ gamma @ P.T`` is the covariance matrix whose mode at position i is
    the input mode ``new_order[i]``; (X, P) pairs stay together.
    """
    n = len(new_order)
    if sorted(new_order) != list(range(n)):
        raise ValueError("new_order must be a permutation of 0..n-1")
    p = np.zeros((2 * n, 2 * n))
    for i, j in enumerate(new_order):
        p[2 * i, 2 * j] = 1.0
        p[2 * i + 1, 2 * j + 1] = 1.0
    return p


def hermitian_min_eig(real_part: np.ndarray, imag_part: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian matrix ``real_part + 1j*imag_part``.

    Evaluated through the real symmetric embedding [[R, -M], [M, R]], whose
    spectrum doubles that of R + iM; avoids complex arithmetic in the hot
    validation path.  ``real_part`` must be symmetric and ``imag_part``
    antisymmetric.
    """
    embed = np.block([[real_part, -imag_part], [imag_part, real_part]])
    return float(np.linalg.eigvalsh(embed)[0])


def _check_even_square(mat: np.ndarray, name: str = "matrix") -> int:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square")
    if mat.shape[0] % 2 != 0 or mat.shape[0] == 0:
        raise ValueError(f"{name} must have even, positive dimension")
    return mat.shape[0] // 2


def is_symplectic(s: np.ndarray, tol: float = ATOL) -> bool:
    """Check whether ``s`` preserves the canonical form.

    True iff the max-norm residual of ``S sigma S^T - sigma`` is within
    ``tol``; a matrix passing the form test is additionally required to have
    determinant 1 within a scale-aware tolerance.
    """
    s = np.asarray(s, dtype=float)
    n = _check_even_square(s, "candidate symplectic")
    form = symplectic_form(n)
    resid = np.max(np.abs(s @ form @ s.T - form))
    if resid > tol:
        return False
    scale = max(1.0, float(np.max(np.abs(s))) ** 2)
    return abs(np.linalg.det(s) - 1.0) <= max(tol, tol * scale)


def is_passive(s: np.ndarray, tol: float = ATOL) -> bool:
    """Check whether a symplectic matrix is additionally orthogonal.

    Raises:
        ValueError: if ``s`` is not symplectic to begin with.
    """
    s = np.asarray(s, dtype=float)
    if not is_symplectic(s, tol):
        raise ValueError("input is not symplectic")
    return float(np.max(np.abs(s.T @ s - np.eye(s.shape[0])))) <= tol


def symplectic_from_hamiltonian(g: np.ndarray, t: float) -> np.ndarray:
    """Linear phase-space flow generated by a quadratic coupling matrix.

    The symmetric matrix ``g`` collects the coefficients of the symmetrized
    quadratic form in the canonical operators; evolving for time ``t`` gives
    the symplectic matrix ``expm(FLOW_CONSTANT * t * sigma @ g)``.

    Args:
        g: real symmetric 2n x 2n coefficient matrix.
        t: evolution time.

    Returns:
        A symplectic 2n x 2n matrix.
    """
    g = np.asarray(g, dtype=float)
    n = _check_even_square(g, "coupling matrix")
    if np.max(np.abs(g - g.T)) > 1e-12 * max(1.0, np.max(np.abs(g))):
        raise ValueError("coupling matrix must be symmetric")
    g = 0.5 * (g + g.T)
    return expm(FLOW_CONSTANT * t * symplectic_form(n) @ g)


def symplectic_inverse(s: np.ndarray) -> np.ndarray:
    """Inverse of a symplectic matrix, computed as sigma S^T sigma^{-1}."""
    s = np.asarray(s, dtype=float)
    n = _check_even_square(s)
    form = symplectic_form(n)
    return form @ s.T @ (-form)


def passive_from_unitary(u: np.ndarray) -> np.ndarray:
    """Orthogonal-symplectic matrix realizing the mode mixing ``a -> u a``.

    Args:
        u: complex n x n unitary matrix.

    Returns:
        Real 2n x 2n matrix acting on (X1, P1, ..., Xn, Pn) coordinates.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("unitary must be square")
    n = u.shape[0]
    k = np.zeros((2 * n, 2 * n))
    re, im = u.real, u.imag
    for j in range(n):
        for l in range(n):
            k[2 * j, 2 * l] = re[j, l]
            k[2 * j, 2 * l + 1] = -im[j, l]
            k[2 * j + 1, 2 * l] = im[j, l]
            k[2 * j + 1, 2 * l + 1] = re[j, l]
    return k


def unitary_from_passive(k: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Recover the n x n unitary underlying an orthogonal-symplectic matrix.

    Inverse of :func:`passive_from_unitary`; the reconstruction is averaged
    over the two redundant real slots and checked for consistency.
    """
    k = np.asarray(k, dtype=float)
    n = _check_even_square(k, "passive matrix")
    re = 0.5 * (k[0::2, 0::2] + k[1::2, 1::2])
    im = 0.5 * (k[1::2, 0::2] - k[0::2, 1::2])
    u = re + 1j * im
    if np.max(np.abs(passive_from_unitary(u) - k)) > tol:
        raise ValueError("matrix is not of passive (orthogonal-symplectic) form")
    return u


def random_quadratic_coupling(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random symmetric 2n x 2n coupling matrix with entries in [-scale, scale]."""
    g = rng.uniform(-scale, scale, size=(2 * n, 2 * n))
    return 0.5 * (g + g.T)


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random symplectic matrix from a random quadratic generator."""
    return symplectic_from_hamiltonian(random_quadratic_coupling(n, rng, scale), 1.0)


def random_passive(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random passive transformation via a random unitary."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return passive_from_unitary(q)


def symplectic_eigenvalues(gamma: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a symmetric matrix, descending.

    The values are the moduli of the eigenvalues of ``1j * sigma @ gamma``,
    each of which occurs twice; one representative per pair is returned.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = _check_even_square(gamma, "covariance")
    vals = np.abs(np.linalg.eigvals(symplectic_form(n) @ gamma))
    return np.sort(vals)[::-1][0::2]


def williamson(gamma: np.ndarray) -> "tuple[np.ndarray, np.ndarray]":
    """Symplectic diagonalization of a positive definite symmetric matrix.

    Returns ``(S, nu)`` with ``S`` symplectic, ``nu`` descending, and
    ``S @ gamma @ S.T == diag(nu_1, nu_1, ..., nu_n, nu_n)``.

    Raises:
        ValueError: for non-symmetric or singular / non-positive input.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = _check_even_square(gamma, "covariance")
    if np.max(np.abs(gamma - gamma.T)) > 1e-10 * max(1.0, np.max(np.abs(gamma))):
        raise ValueError("covariance matrix must be symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (gamma + gamma.T))
    if vals[0] <= 0:
        raise ValueError("matrix must be positive definite")
    inv_sqrt = vecs @ np.diag(vals ** -0.5) @ vecs.T
    form = symplectic_form(n)
    w = inv_sqrt @ form @ inv_sqrt
    w = 0.5 * (w - w.T)
    t, o = schur(w, output="real")
    # normalize every 2x2 Schur block to have a positive upper entry
    for j in range(n):
        if t[2 * j, 2 * j + 1] < 0:
            o[:, [2 * j, 2 * j + 1]] = o[:, [2 * j + 1, 2 * j]]
            t[:, [2 * j, 2 * j + 1]] = t[:, [2 * j + 1, 2 * j]]
            t[[2 * j, 2 * j + 1], :] = t[[2 * j + 1, 2 * j], :]
    nus = np.array([1.0 / t[2 * j, 2 * j + 1] for j in range(n)])
    order = np.argsort(nus)[::-1]
    perm = mode_permutation(list(order))
    nus = nus[order]
    d_half = np.diag(np.repeat(np.sqrt(nus), 2))
    s = d_half @ (o @ perm.T).T @ inv_sqrt
    return s, nus


def _symplectic_gram_schmidt_pair(basis: np.ndarray, form: np.ndarray) -> "tuple[np.ndarray, np.ndarray]":
    """Split an even-dimensional form-invariant subspace into (v, w) pairs.

    ``basis`` holds orthonormal columns spanning a subspace mapped to itself
    by the form; returns column stacks (V, W) with W = form^T V, jointly
    orthonormal and symplectically paired.
    """
    cols = [basis[:, j] for j in range(basis.shape[1])]
    vs, ws = [], []
    while cols:
        v = cols.pop(0)
        for u in vs + ws:
            v = v - (u @ v) * u
        nrm = np.linalg.norm(v)
        if nrm < 1e-10:
            continue
        v = v / nrm
        w = form.T @ v
        vs.append(v)
        ws.append(w)
    return np.column_stack(vs) if vs else np.zeros((basis.shape[0], 0)), (
        np.column_stack(ws) if ws else np.zeros((basis.shape[0], 0))
    )


def euler_decomposition(s: np.ndarray) -> "tuple[np.ndarray, np.ndarray, np.ndarray]":
    """Factor a symplectic matrix as passive * squeezing * passive.

    Returns ``(K, d, L)`` with ``K`` and ``L`` passive, ``d`` the length-n
    vector of squeezing factors (all >= 1 in this construction), and
    ``K @ direct_sum(diag(d_j, 1/d_j)...) @ L`` reconstructing ``s``.
    The individual factors are not unique; only the reconstruction and the
    multiset of factors are contractual.
    """
    s = np.asarray(s, dtype=float)
    n = _check_even_square(s, "symplectic matrix")
    if not is_symplectic(s, tol=1e-6):
        raise ValueError("input is not symplectic")
    form = symplectic_form(n)
    o, p = polar(s, side="left")  # s = p @ o with p spd symplectic, o passive
    vals, vecs = np.linalg.eigh(p)
    pair_v, pair_d = [], []
    # eigenvalues of a symplectic spd matrix come in (d, 1/d) pairs with
    # eigenvectors exchanged by the form; build the passive diagonalizer
    # from the d > 1 eigenvectors and a paired basis of the fixed subspace
    above = vals > 1.0 + 1e-10
    near_one = np.abs(vals - 1.0) <= 1e-10
    for idx in np.nonzero(above)[0]:
        pair_v.append(vecs[:, idx])
        pair_d.append(vals[idx])
    fixed = vecs[:, near_one]
    if fixed.shape[1] % 2 != 0:
        # borderline eigenvalues straddling the threshold; re-split by value
        near_one = np.abs(vals - 1.0) <= 1e-8
        above = vals > 1.0 + 1e-8
        pair_v = [vecs[:, i] for i in np.nonzero(above)[0]]
        pair_d = [vals[i] for i in np.nonzero(above)[0]]
        fixed = vecs[:, near_one]
    cols = []
    ds = []
    for v, d in zip(pair_v, pair_d):
        cols.append(v)
        cols.append(form.T @ v)
        ds.append(d)
    if fixed.shape[1]:
        fv, fw = _symplectic_gram_schmidt_pair(fixed, form)
        for j in range(fv.shape[1]):
            cols.append(fv[:, j])
            cols.append(fw[:, j])
            ds.append(1.0)
    k = np.column_stack(cols)
    d = np.asarray(ds)
    order = np.argsort(d)[::-1]
    k = k @ mode_permutation(list(order)).T
    d = d[order]
    l = k.T @ o
    return k, d, l


def squeezing_diagonal(d: np.ndarray) -> np.ndarray:
    """Middle Euler factor: direct sum of diag(d_j, 1/d_j) blocks."""
    d = np.asarray(d, dtype=float)
    return np.diag(np.ravel([(dj, 1.0 / dj) for dj in d]))
