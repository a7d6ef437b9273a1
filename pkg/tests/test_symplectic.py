import numpy as np
import pytest

from cvgauss import symplectic as sym

from conftest import random_valid_cov


def test_form_single_mode():
    assert np.array_equal(sym.symplectic_form(1), [[0.0, 1.0], [-1.0, 0.0]])


def test_form_two_modes_block_diagonal():
    f = sym.symplectic_form(2)
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.array_equal(f[:2, :2], block)
    assert np.array_equal(f[2:, 2:], block)
    assert np.all(f[:2, 2:] == 0) and np.all(f[2:, :2] == 0)


def test_form_squares_to_minus_identity():
    f = sym.symplectic_form(3)
    assert np.allclose(f @ f, -np.eye(6))
    assert np.allclose(f.T, -f)
    assert np.isclose(np.linalg.det(f), 1.0)


def test_form_rejects_zero_modes():
    with pytest.raises(ValueError):
        sym.symplectic_form(0)


def test_is_symplectic_identity():
    assert sym.is_symplectic(np.eye(6))


def test_is_symplectic_single_mode_squeezer():
    assert sym.is_symplectic(np.diag([3.0, 1.0 / 3.0]))


def test_is_symplectic_rejects_uniform_scaling():
    assert not sym.is_symplectic(np.diag([2.0, 2.0]))


def test_is_symplectic_rejects_odd_dimension():
    with pytest.raises(ValueError):
        sym.is_symplectic(np.eye(3))


def test_is_passive_rotation():
    th = 0.7
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert sym.is_passive(rot)


def test_is_passive_rejects_squeezer():
    assert not sym.is_passive(np.diag([2.0, 0.5]))


def test_is_passive_raises_on_non_symplectic():
    with pytest.raises(ValueError):
        sym.is_passive(np.diag([2.0, 2.0]))


def test_balanced_splitter_from_generator_is_passive():
    g = np.zeros((4, 4))
    g[1, 2] = g[2, 1] = 0.5
    g[0, 3] = g[3, 0] = -0.5
    s = sym.symplectic_from_hamiltonian(g, np.pi / 4.0)
    assert sym.is_passive(s)
    # equal mixing of the X quadratures
    assert np.isclose(s[0, 0], np.sqrt(0.5)) and np.isclose(abs(s[0, 2]), np.sqrt(0.5))


def test_zero_coupling_gives_identity():
    assert np.allclose(sym.symplectic_from_hamiltonian(np.zeros((2, 2)), 1.3), np.eye(2))


def test_oscillator_coupling_gives_rotations():
    for t in np.linspace(0.0, 2.0, 9):
        s = sym.symplectic_from_hamiltonian(np.eye(2), t)
        assert sym.is_passive(s)
        assert np.isclose(s[0, 0], np.cos(2.0 * t))


def test_generator_outputs_are_symplectic(rng):
    for _ in range(50):
        n = int(rng.integers(1, 4))
        g = sym.random_quadratic_coupling(n, rng)
        s = sym.symplectic_from_hamiltonian(g, float(rng.uniform(0.0, 1.5)))
        f = sym.symplectic_form(n)
        assert np.max(np.abs(s @ f @ s.T - f)) <= 1e-10
        assert abs(np.linalg.det(s) - 1.0) <= 1e-8


def test_non_symmetric_coupling_rejected():
    with pytest.raises(ValueError):
        sym.symplectic_from_hamiltonian(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_symplectic_inverse(rng):
    s = sym.random_symplectic(2, rng)
    assert np.allclose(sym.symplectic_inverse(s) @ s, np.eye(4), atol=1e-12)


def test_passive_unitary_round_trip(rng):
    k = sym.random_passive(3, rng)
    u = sym.unitary_from_passive(k)
    assert np.allclose(sym.passive_from_unitary(u), k)
    assert np.allclose(u @ u.conj().T, np.eye(3), atol=1e-12)


def test_euler_passive_input_has_unit_factors(rng):
    k = sym.random_passive(2, rng)
    _, d, _ = sym.euler_decomposition(k)
    assert np.allclose(d, 1.0, atol=1e-9)


def test_euler_squeezer_already_normal():
    r = 0.8
    s = np.diag([np.exp(r), np.exp(-r)])
    k, d, l = sym.euler_decomposition(s)
    assert np.allclose(d, [np.exp(r)], atol=1e-10)
    assert np.allclose(k @ sym.squeezing_diagonal(d) @ l, s, atol=1e-10)


def test_euler_round_trip_hundred_random(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 4))
        s = sym.random_symplectic(n, rng)
        k, d, l = sym.euler_decomposition(s)
        assert sym.is_passive(k)
        assert sym.is_passive(l)
        assert np.all(d > 0)
        worst = max(worst, float(np.max(np.abs(k @ sym.squeezing_diagonal(d) @ l - s))))
    assert worst <= 1e-8


def test_euler_rejects_non_symplectic():
    with pytest.raises(ValueError):
        sym.euler_decomposition(np.diag([2.0, 2.0]))


def test_williamson_vacuum():
    s, nu = sym.williamson(np.eye(2))
    assert np.allclose(nu, [1.0])
    assert sym.is_passive(s)


def test_williamson_thermal_diagonal():
    s, nu = sym.williamson(np.diag([2.0, 2.0]))
    assert np.allclose(nu, [2.0])


def test_williamson_pure_two_mode_block():
    c, sh = np.cosh(1.0), np.sinh(1.0)
    z = np.diag([sh, -sh])
    gamma = np.block([[c * np.eye(2), z], [z, c * np.eye(2)]])
    _, nu = sym.williamson(gamma)
    assert np.allclose(nu, [1.0, 1.0], atol=1e-10)


def test_williamson_random_residuals(rng):
    for _ in range(30):
        n = int(rng.integers(1, 4))
        gamma = random_valid_cov(n, rng)
        s, nu = sym.williamson(gamma)
        target = np.diag(np.repeat(nu, 2))
        assert np.max(np.abs(s @ gamma @ s.T - target)) <= 1e-8
        assert sym.is_symplectic(s, tol=1e-8)
        assert np.all(np.diff(nu) <= 1e-12)


def test_williamson_rejects_indefinite():
    with pytest.raises(ValueError):
        sym.williamson(np.diag([1.0, -1.0]))


def test_symplectic_eigenvalues_match_williamson(rng):
    gamma = random_valid_cov(2, rng)
    _, nu = sym.williamson(gamma)
    assert np.allclose(sym.symplectic_eigenvalues(gamma), nu, atol=1e-9)


def test_mode_permutation_reorders_blocks():
    p = sym.mode_permutation([1, 0])
    gamma = np.diag([1.0, 2.0, 3.0, 4.0])
    assert np.allclose(p @ gamma @ p.T, np.diag([3.0, 4.0, 1.0, 2.0]))


def test_direct_sum():
    out = sym.direct_sum(np.eye(2), 2.0 * np.eye(2))
    assert np.allclose(out, np.diag([1.0, 1.0, 2.0, 2.0]))
