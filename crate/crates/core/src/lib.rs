//! Numerical toolkit for coupled quasilinear elliptic systems whose
//! principal part depends on the solution, with nonlinearities allowed to
//! grow beyond the critical Sobolev exponent.

// negated comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod eigen;
pub mod energy;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod linalg;
pub mod model;
pub mod mpsolver;
pub mod serial;

pub use eigen::{first_eigenpair, rayleigh_quotient, EigenOptions, EigenPair};
pub use energy::{
    default_fd_steps, dj_apply, energy_terms, finite_difference_check, gradient_representative,
    j_eval, j_eval_with, j_value, nodal_gradient, seeded_test_pair, EnergyReport, GradCheck,
};
pub use error::{Error, Result};
pub use exponents::{
    check_model_hypotheses, compute_model_constants, critical_exponent, derive_auxiliary_exponents,
    CheckOptions, DerivedExponents, ExponentConfig, HypothesisRecord, HypothesisReport,
    ModelConstants,
};
pub use grid::{ell_norm, FieldPair, Grid, GridFunction};
pub use model::{
    sample_structural_hypotheses, sample_structural_hypotheses_with, Evaluators, ModelFunctions,
    SampledBound, SamplerParams, StructuralSample,
};
pub use mpsolver::{
    certify_geometry, find_endpoint, mountain_pass_search, multiplicity_search, verify_candidate,
    CandidateSummary, CriticalPointCandidate, GeometryCertificate, GeometrySummary,
    MountainPassParams, Provenance, SymmetryClass, Verification,
};
