use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("party index {party} out of range for {parties} parties")]
    InvalidParty { party: usize, parties: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a valid state: {0}")]
    InvalidState(String),

    #[error("probability vector invalid: {0}")]
    InvalidProbabilities(String),

    #[error("infeasible second moment {0} (no admissible correlation matrix)")]
    InfeasibleMoment(f64),

    #[error("measurement records are rank deficient: {0}")]
    RankDeficient(String),

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}
