"""Certified lower bounds on the quantum capacity of bosonic and qubit channels from test data."""

from .gaussmath import (
    binary_entropy,
    bona_fide_check,
    erf_probability_in_window,
    erf_tail_outside_window,
    g_entropy,
    gamma_fn,
    gaussian_state_entropy,
    log2_gamma_fn,
    symplectic_eigenvalues,
    symplectic_form,
)
from .channels import (
    ChannelModel,
    ProbeEnsemble,
    apply_channel_cov,
    make_rng,
    nbar_to_squeezing_db,
    sample_channel_quadrature,
    squeezing_db_to_nbar,
    tmsv_cov,
)
from .protocol1 import (
    ProtocolOneConfig,
    ProtocolOneVerdict,
    TestRecord,
    TheoremOneBound,
    asymptotic_B,
    asymptotic_threshold_t,
    correlation_test,
    discretize,
    entanglement_bound,
    pass_probability_pure_loss,
    run_protocol_one,
    theorem1_bound,
)
from .protocol2 import (
    HeterodyneRecord,
    ProtocolTwoConfig,
    ProtocolTwoVerdict,
    asymptotic_Biid,
    channel_thresholds,
    energy_constrained_capacity_pure_loss,
    gamma_min,
    optimal_thresholds_loss,
    run_protocol_two,
    sigma_max,
    simulate_heterodyne_pairs,
    theorem2_bound,
    threshold_test,
)
from .qubit import (
    QubitChannelSpec,
    TomographyCounts,
    choi_state,
    coherent_information,
    coherent_information_closed_form,
    confidence_epsilon,
    definetti_epsilon,
    polytope_halfspace_check,
    qubit_iid_bound,
    qubit_noniid_bound,
    simulate_tomography,
    worst_case_conditional_entropy,
)

__version__ = "0.1.0"
