//! Ground truth by brute force: exhaustive trajectory enumeration for the
//! closure measures, numerical quadrature for the Dirichlet integrals.

pub mod conformance;
pub mod joint;
pub mod quadrature;

pub use conformance::{run_conformance, ConformanceRecord, ConformanceSummary, GridOptions};
pub use joint::{
    build_joint, build_joint_with_cap, oracle_mutual_information, oracle_ntic,
    oracle_transfer_entropy, InfoMode, JointAnalysis, JointEntry, JointTable, DEFAULT_JOINT_CAP,
};
pub use quadrature::{oracle_expected_log_prob, oracle_kl_quadrature, tanh_sinh, Quadrature};
