"""Phase-space calculus for Gaussian quantum states.

Covariance-matrix validation, symplectic transformations and
decompositions, entanglement criteria and measures, Gaussian channels and
conditional measurements, entanglement-manipulation protocols, and a
truncated number-basis backend that cross-checks every closed-form result.
"""

from .channels import (
    GaussianChannel,
    GaussianCPMap,
    apply_channel,
    apply_cp_map,
    attenuation_channel,
    channel_as_cp_map,
    channel_valid,
    cp_map_valid,
    homodyne_condition,
    log_channel_verify,
    vacuum_project,
)
from .entanglement import (
    GapResult,
    PPTReport,
    SchmidtForm,
    SimonForm,
    entropy_of_entanglement_pure,
    glocc_convertible,
    glocc_vs_locc_gap,
    locc_convertible_pure,
    log_negativity_gaussian,
    partial_transpose_cov,
    ppt_verdict,
    schmidt_normal_form,
    separability_witness_verify,
    simon_normal_form,
)
from .errors import InfeasibleError, PhysicalityError
from .fock import (
    FockDensity,
    FockVector,
    beam_splitter_fock,
    continuity_demo,
    displacement_fock,
    fock_covariance,
    gaussian_density_fock,
    gaussian_to_fock,
    log_negativity_fock,
    mean_energy_fock,
    partial_trace,
    partial_transpose_fock,
    squeezer_fock,
    trace_norm,
    two_mode_squeezed_fock,
    von_neumann_entropy,
    weyl_fock,
)
from .protocols import (
    DistillationRecord,
    GaussianLoccProtocol,
    distill_pipeline,
    gaussian_locc_step,
    gaussianity_distance,
    gaussify_step,
    no_go_monte_carlo,
    nongaussian_first_step,
    passive_max_entanglement,
    passive_optimizer,
)
from .states import (
    GaussianState,
    ModePartition,
    ValidityReport,
    apply_symplectic,
    characteristic_function,
    is_squeezed,
    mean_photon_number,
    thermal_state,
    two_mode_squeezed_cov,
    two_mode_squeezed_state,
    vacuum_state,
    validate_covariance,
    wigner_at,
)
from .symplectic import (
    euler_decomposition,
    is_passive,
    is_symplectic,
    random_passive,
    random_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_from_hamiltonian,
    williamson,
)

__version__ = "0.1.0"
