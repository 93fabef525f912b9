//! Triangle detection: hypotheses on (C_i, f_i, g_i, H_i, F_i, G_i), the
//! total complex and its acyclicity, the anti-chain map φ and its cone, the
//! six-column spectral sequence, the quasi-isomorphism δ, and iterated cones.

pub mod generate;
pub mod hypotheses;
pub mod iterated;
pub mod phi;
pub mod total;

pub use generate::{
    conjugate, generate_valid_instance, inject_fault, random_chain_map, random_complex, random_map, rotation_instance,
    Fault, InstanceParams, RETRY_BUDGET,
};
pub use hypotheses::{
    is_anti_quasi_iso, unipotent_certificate, verify_hypotheses, Check, CheckOutcome, HypothesisReport,
    IntTriangle, LaurentTriangle, QuasiIsoMode, TriangleHypotheses,
};
pub use iterated::{iterated_cone_filtration, IteratedCone};
pub use phi::{build_phi_cone, phi_kills_homology, run_six_step_ss, PhiConeDatum, SixStepTrace};
pub use total::{
    build_delta, build_total, build_total_unchecked, check_acyclic, total_shifts, Acyclicity, Delta,
    TotalComplex,
};
