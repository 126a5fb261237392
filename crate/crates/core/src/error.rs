use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "infeasible Young-split interval for {which}: lower bound {lower} >= upper bound {upper}"
    )]
    InfeasibleInterval {
        which: &'static str,
        lower: f64,
        upper: f64,
    },

    #[error("configuration is not admissible; failing records: {}", .0.join(", "))]
    NotAdmissible(Vec<String>),

    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("non-finite value encountered while evaluating {0}")]
    NonFinite(&'static str),

    #[error("linear solve failed: matrix is not positive definite at row {row}")]
    LinearSolve { row: usize },

    #[error("zero field has no Rayleigh quotient")]
    ZeroField,

    #[error("no negative energy found along the ray after {doublings} doublings")]
    NoNegativeEnergy { doublings: u32 },

    #[error("geometry certificate is not validated (min sampled energy {rho0})")]
    GeometryNotValidated { rho0: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
