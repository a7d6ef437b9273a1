import numpy as np
import pytest

from cvgauss import entanglement as ent
from cvgauss import fock as fk
from cvgauss import protocols as pr
from cvgauss import states as st
from cvgauss import symplectic as sym
from cvgauss.errors import InfeasibleError

from conftest import random_valid_cov

AB = ent.ModePartition.from_string("AB")


# ------------------------------------------------------------ template step


def test_identity_protocol_returns_input_exactly():
    gamma = st.two_mode_squeezed_cov(0.5)
    proto = pr.GaussianLoccProtocol(np.eye(4), np.eye(4))
    out = pr.gaussian_locc_step(gamma, proto)
    assert np.array_equal(out, gamma)


def test_step_against_independent_schur_arithmetic(rng):
    # same composition written out by hand: regroup, congruence, two
    # pseudo-inverse conditionings, post-processing
    gamma = random_valid_cov(2, rng)
    proto = pr.random_protocol(rng)
    out = pr.gaussian_locc_step(gamma, proto)

    perm = sym.mode_permutation([0, 2, 1, 3])
    big = sym.direct_sum(proto.s_a, proto.s_b) @ (
        perm @ sym.direct_sum(gamma, gamma) @ perm.T
    ) @ sym.direct_sum(proto.s_a, proto.s_b).T

    def condition(mat, mode, quad):
        n = mat.shape[0] // 2
        keep = [m for m in range(n) if m != mode]
        order = keep + [mode]
        p = sym.mode_permutation(order)
        g = p @ mat @ p.T
        a, b, c = g[:-2, :-2], g[-2:, -2:], g[:-2, -2:]
        pi = np.diag([1.0, 0.0]) if quad == "X" else np.diag([0.0, 1.0])
        return a - c @ np.linalg.pinv(pi @ b @ pi, rcond=1e-12) @ c.T

    manual = condition(big, 3, proto.quad_b)
    manual = condition(manual, 1, proto.quad_a)
    post = sym.direct_sum(proto.post_a, proto.post_b)
    manual = post @ manual @ post.T
    assert np.max(np.abs(out - manual)) <= 1e-10


def test_step_mixing_then_vacuum_matches_fock_oracle():
    # replace the quadrature readouts with vacuum projections, which the
    # truncated backend can represent exactly, and compare conditional
    # covariance matrices for the balanced-mixing protocol
    r, d = 0.4, 12
    g_mix = np.zeros((4, 4))
    g_mix[1, 2] = g_mix[2, 1] = 0.5
    g_mix[0, 3] = g_mix[3, 0] = -0.5
    s_mix = sym.symplectic_from_hamiltonian(g_mix, np.pi / 4.0)

    gamma = st.two_mode_squeezed_cov(r)
    perm = sym.mode_permutation([0, 2, 1, 3])
    big = perm @ sym.direct_sum(gamma, gamma) @ perm.T
    local = sym.direct_sum(s_mix, s_mix)
    big = local @ big @ local.T
    from cvgauss.channels import vacuum_project

    state = st.GaussianState(big)
    state, p_b = vacuum_project(state, 3)
    state, p_a = vacuum_project(state, 1)
    gauss_cov = state.cov

    pair = fk.two_mode_squeezed_fock(r, d)
    amps = np.einsum("ab,cd->acbd", pair.amps, pair.amps)  # (A1, A2, B1, B2)
    u = fk.passive_fock(sym.unitary_from_passive(s_mix), d)
    vec = fk.FockVector(amps)
    vec = fk.apply_unitary(vec, u, [0, 1])
    vec = fk.apply_unitary(vec, u, [2, 3])
    vec, q_b = fk.project_vacuum_fock(vec, 3)
    vec, q_a = fk.project_vacuum_fock(vec, 1)
    fock_cov, _ = fk.fock_covariance(vec)
    # fock modes now ordered (A1, B1)
    assert np.max(np.abs(fock_cov - gauss_cov)) <= 1e-3
    assert q_a * q_b == pytest.approx(p_a * p_b, abs=1e-6)


def test_any_protocol_keeps_separable_states_ppt(rng):
    for _ in range(100):
        ga = random_valid_cov(1, rng)
        gb = random_valid_cov(1, rng)
        gamma = sym.direct_sum(ga, gb)
        out = pr.gaussian_locc_step(gamma, pr.random_protocol(rng))
        assert ent.ppt_verdict(out, AB).verdict == "PPT"


def test_step_outputs_are_valid(rng):
    for _ in range(50):
        gamma = random_valid_cov(2, rng)
        out = pr.gaussian_locc_step(gamma, pr.random_protocol(rng))
        assert st.validate_covariance(out).valid


def test_malformed_protocol_rejected():
    with pytest.raises(ValueError):
        pr.GaussianLoccProtocol(np.eye(4) * 2.0, np.eye(4))
    with pytest.raises(ValueError):
        pr.GaussianLoccProtocol(np.eye(4), np.eye(4), quad_a="Y")


# -------------------------------------------------------------------- no-go


def test_no_go_monte_carlo_deterministic():
    gamma = st.two_mode_squeezed_cov(0.5)
    a = pr.no_go_monte_carlo(gamma, 50, seed=7)
    b = pr.no_go_monte_carlo(gamma, 50, seed=7)
    assert a.max_gain == b.max_gain
    assert a.median_gain == b.median_gain


def test_no_go_short_run_never_gains():
    gamma = st.two_mode_squeezed_cov(0.5)
    res = pr.no_go_monte_carlo(gamma, 200, seed=3)
    assert res.baseline == pytest.approx(np.log2(np.e), abs=1e-9)
    assert res.max_gain <= 1e-9
    assert res.median_gain < 0  # generic rounds lose entanglement


# --------------------------------------------------------------- first step


def test_first_step_output_is_non_gaussian():
    rho, _ = pr.nongaussian_first_step(0.3, 0.7, 12)
    gamma, disp = fk.fock_covariance(rho)
    ref = fk.gaussian_density_fock(st.GaussianState(gamma, disp), 12)
    assert fk.state_fidelity(rho, ref) < 1.0 - 1e-4
    assert pr.gaussianity_distance(rho) > 1e-3


def test_first_step_click_probability_vanishes_with_squeezing():
    _, p_tiny = pr.nongaussian_first_step(0.02, 0.7, 10)
    _, p_small = pr.nongaussian_first_step(0.1, 0.7, 10)
    _, p_mid = pr.nongaussian_first_step(0.3, 0.7, 10)
    assert p_tiny < p_small < p_mid
    assert p_tiny < 1e-3


def test_first_step_probability_against_dense_composition():
    # independent route: dense Kraus operators on the four-mode density
    r, v, d = 0.3, 0.7, 6
    pair = fk.two_mode_squeezed_fock(r, d)
    psi = np.zeros((d, d, d, d), dtype=complex)
    psi[:, :, 0, 0] = pair.amps
    u = fk.beam_splitter_fock(v, np.sqrt(1 - v * v), d)
    vec = fk.FockVector(psi)
    vec = fk.apply_unitary(vec, u, [0, 2])
    vec = fk.apply_unitary(vec, u, [1, 3])
    proj = np.zeros((d, d))
    proj[0, 0] = 1.0
    click = np.eye(d) - proj
    dens = vec.density()
    kraus = np.kron(np.kron(np.eye(d), np.eye(d)), np.kron(click, click))
    conditioned = kraus @ dens.mat @ kraus.conj().T
    p_dense = float(np.real(np.trace(conditioned)))
    rho, p = pr.nongaussian_first_step(r, v, d)
    assert p == pytest.approx(p_dense, abs=1e-10)
    reduced = fk.partial_trace(fk.FockDensity(conditioned / p_dense, 4, d), [0, 1])
    assert np.max(np.abs(reduced.mat - rho.mat)) <= 1e-10


def test_first_step_entanglement_gain_exists():
    e_in = 2 * 0.3 * np.log2(np.e)
    rho, _ = pr.nongaussian_first_step(0.3, np.sqrt(0.9), 12)
    assert fk.log_negativity_fock(rho, AB) > e_in


def test_first_step_rejects_degenerate_splitter():
    with pytest.raises(ValueError):
        pr.nongaussian_first_step(0.3, 1.0, 10)
    with pytest.raises(ValueError):
        pr.nongaussian_first_step(0.3, 0.0, 10)


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_first_step_rejects_tiny_cutoff():
    with pytest.raises(InfeasibleError):
        pr.nongaussian_first_step(2.5, 0.5, 4)


# ----------------------------------------------------------------- gaussify


def test_gaussify_vacuum_is_fixed_point():
    out, p = pr.gaussify_step(fk.vacuum_fock(2, 8).density())
    assert p == pytest.approx(1.0, abs=1e-12)
    assert out.mat[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_gaussify_preserves_pair_family():
    rho = fk.two_mode_squeezed_fock(0.4, 14).density()
    out, p = pr.gaussify_step(rho)
    assert 0.0 < p <= 1.0
    gamma, _ = fk.fock_covariance(out)
    r_fit = 0.5 * np.arccosh(max(gamma[0, 0], 1.0))
    ref = fk.two_mode_squeezed_fock(r_fit, 14).density()
    assert fk.state_fidelity(out, ref) >= 1.0 - 1e-6


def test_gaussify_outputs_valid_densities():
    rho, _ = pr.nongaussian_first_step(0.3, 0.7, 10)
    out, p = pr.gaussify_step(rho)
    assert 0.0 < p <= 1.0
    assert out.trace == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(out.mat - out.mat.conj().T)) <= 1e-12
    assert np.min(np.linalg.eigvalsh(out.mat)) >= -1e-12


def test_gaussify_probability_matches_dense_composition():
    # independent route: evolve every eigenvector of the two-copy density
    # and condition on the double vacuum by slicing
    r, d = 0.3, 6
    rho = fk.two_mode_squeezed_fock(r, d).density()
    out, p = pr.gaussify_step(rho)
    big = np.kron(rho.mat, rho.mat)  # modes (A1, B1, A2, B2)
    u = fk.beam_splitter_fock(1 / np.sqrt(2), 1 / np.sqrt(2), d)
    vals, vecs = np.linalg.eigh(big)
    total = np.zeros((d * d, d * d), dtype=complex)
    p_acc = 0.0
    for w, col in zip(vals, vecs.T):
        if w < 1e-14:
            continue
        vec = fk.FockVector(col.reshape(d, d, d, d))
        vec = fk.apply_unitary(vec, u, [0, 2])
        vec = fk.apply_unitary(vec, u, [1, 3])
        sub = vec.amps[:, :, 0, 0]
        p_acc += w * float(np.sum(np.abs(sub) ** 2))
        flat = sub.ravel()
        total += w * np.outer(flat, flat.conj())
    assert p == pytest.approx(p_acc, abs=1e-10)
    assert np.max(np.abs(out.mat - total / p_acc)) <= 1e-10


def test_gaussify_drives_toward_gaussian():
    rho, _ = pr.nongaussian_first_step(0.3, np.sqrt(0.8), 12)
    d0 = pr.gaussianity_distance(rho)
    rho1, _ = pr.gaussify_step(rho)
    d1 = pr.gaussianity_distance(rho1)
    rho2, _ = pr.gaussify_step(rho1)
    d2 = pr.gaussianity_distance(rho2)
    assert d0 > d1 > d2


# ----------------------------------------------------------------- pipeline


def test_pipeline_zero_iterations_single_record():
    records = pr.distill_pipeline(0.3, 0.7, 0, 10)
    assert len(records) == 1
    assert records[0].step == 0


def test_pipeline_probabilities_multiply():
    records = pr.distill_pipeline(0.3, 0.7, 2, 10)
    cum = 1.0
    for rec in records:
        assert 0.0 < rec.success_probability <= 1.0
        cum *= rec.success_probability
        assert rec.cumulative_probability == pytest.approx(cum, abs=1e-12)
    assert all(
        records[i].cumulative_probability >= records[i + 1].cumulative_probability
        for i in range(len(records) - 1)
    )


# ------------------------------------------------------------- passive optics


def test_passive_bound_vacuum_and_thermal():
    assert pr.passive_max_entanglement(np.eye(4)) == 0.0
    assert pr.passive_max_entanglement(np.diag([2.0, 2.0, 2.0, 2.0])) == 0.0


def test_passive_bound_two_squeezed_inputs_and_construction():
    r = 0.5
    gamma = sym.direct_sum(
        np.diag([np.exp(2 * r), np.exp(-2 * r)]), np.diag([np.exp(2 * r), np.exp(-2 * r)])
    )
    bound = pr.passive_max_entanglement(gamma)
    assert bound == pytest.approx(2 * r * np.log2(np.e), abs=1e-12)
    # explicit construction: rotate one squeezing axis by pi/2, then mix
    # on the balanced splitter (equal-orientation inputs would decorrelate)
    quarter = sym.direct_sum(np.eye(2), np.array([[0.0, -1.0], [1.0, 0.0]]))
    g_mix = np.zeros((4, 4))
    g_mix[1, 2] = g_mix[2, 1] = 0.5
    g_mix[0, 3] = g_mix[3, 0] = -0.5
    s = sym.symplectic_from_hamiltonian(g_mix, np.pi / 4.0) @ quarter
    assert sym.is_passive(s)
    mixed = s @ gamma @ s.T
    achieved = ent.log_negativity_gaussian(mixed, AB)
    assert achieved == pytest.approx(bound, abs=1e-9)


def test_passive_bound_rejects_invalid():
    from cvgauss.errors import PhysicalityError

    with pytest.raises(PhysicalityError):
        pr.passive_max_entanglement(0.5 * np.eye(4))


def test_optimizer_reaches_bound_single_case():
    r = 0.5
    gamma = sym.direct_sum(
        np.diag([np.exp(2 * r), np.exp(-2 * r)]), np.diag([np.exp(2 * r), np.exp(-2 * r)])
    )
    res = pr.passive_optimizer(gamma, restarts=4, seed=0)
    assert res.achieved == pytest.approx(1.4427, abs=1e-3)
    assert sym.is_passive(res.k)


def test_optimizer_never_exceeds_bound(rng):
    for seed in range(3):
        gamma = random_valid_cov(2, rng)
        bound = pr.passive_max_entanglement(gamma)
        res = pr.passive_optimizer(gamma, restarts=3, seed=seed)
        assert res.achieved <= bound + 1e-6


def test_optimizer_three_modes():
    gamma = sym.direct_sum(np.diag([np.exp(2.4), np.exp(-2.4)]), np.eye(2), np.eye(2))
    bound = pr.passive_max_entanglement(gamma)
    res = pr.passive_optimizer(gamma, restarts=6, seed=1)
    assert res.achieved == pytest.approx(bound, abs=1e-3)


def test_optimizer_deterministic_per_seed():
    gamma = sym.direct_sum(np.diag([np.exp(1.0), np.exp(-1.0)]), np.eye(2))
    a = pr.passive_optimizer(gamma, restarts=2, seed=5)
    b = pr.passive_optimizer(gamma, restarts=2, seed=5)
    assert a.achieved == b.achieved
    assert np.array_equal(a.k, b.k)


def test_optimizer_rejects_single_mode():
    with pytest.raises(ValueError):
        pr.passive_optimizer(np.eye(2))
