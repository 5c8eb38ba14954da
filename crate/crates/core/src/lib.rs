//! Disjointness preservation for operators between finite-dimensional Banach lattices.
//!
//! Spaces are `ℝⁿ` with the coordinatewise order and one of the norms in
//! [`NormSpec`]. Operators are real matrices. The crate measures how far an
//! operator is from preserving disjointness, builds disjointness-preserving
//! approximants with certified distances, and checks the supporting
//! inequalities by exact enumeration.

pub mod approx;
pub mod defects;
pub mod error;
pub mod inequalities;
pub mod instances;
pub mod lattice;
pub mod operator;
pub mod opnorm;
mod search;
pub mod suites;

pub use error::{LatticeError, Result};
pub use lattice::{lattice_ops, p_sum, Exponent, LatticeOps, LatticeSpace, LatticeVector, NormSpec};
pub use operator::{modulus, LatticeOperator};
pub use opnorm::{
    certified_upper_bound, column_norm_upper_bound, interpolation_upper_bound, operator_norm, NormMethod,
    OperatorNormEstimate,
};
pub use approx::{
    alternating_assignment, approximate_l1_target, approximate_lq_target, assignment_objective,
    build_dp_from_assignment, construct_dp_linfty, construct_dp_supnorm_target, construct_dp_threshold,
    is_disjointness_preserving, optimal_assignment_bruteforce, phi_n, power_transfer, root_transfer, ApproxMethod,
    ApproxResult, SupportAssignment,
};
pub use defects::{
    almost_disjoint_check, dp_defect_search, dp_defect_search_positive_pairs, indicator_split_defect, lh_defect,
    lh_defect_search, mp_defect, mp_defect_search, pairwise_dp_value, sdp_atom_defect, sdp_defect,
    DefectCertificate, DefectEstimate, DefectKind, IndicatorOptions, SearchOptions,
};
pub use inequalities::{
    arb_number_check, expected_min_split, expected_min_split_sampled, iterated_join_check, maxmin_operator_check,
    maxmin_sandwich_check, net_estimate_check, refinement_norm_demo, sphere_net, vector_split_check, SphereNet,
};
pub use instances::{
    direct_sum, dp_distance_column_lower_bound, graph_eps, graph_operator, graph_verify, instance_json,
    perturbed_dp_instance, walsh_block, walsh_operator, walsh_verify, ColumnBound, GraphInstance, InstanceMeta,
    WalshInstance,
};
pub use suites::{digest, run_suite, Suite, SuiteReport};
