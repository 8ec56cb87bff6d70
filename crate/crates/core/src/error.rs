use thiserror::Error;

/// Failures raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("columns are not orthonormal (max deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("invalid leverage profile: {0}")]
    InvalidProfile(String),

    #[error("power-law fit needs at least 2 positive scores, found {found}")]
    InsufficientData { found: usize },

    #[error("threshold {theta} is infeasible for total score mass {total}")]
    InfeasibleThreshold { theta: f64, total: f64 },

    #[error("threshold {0} must be positive and finite")]
    InvalidThreshold(f64),

    #[error("invalid column count {c} for {n} columns")]
    InvalidColumnCount { c: usize, n: usize },

    #[error("column index {index} out of range for {n} columns")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("requested rank {k} exceeds numerical rank {rank}")]
    RankDeficient { k: usize, rank: usize },

    #[error("invalid rank parameter k={k}: {reason}")]
    InvalidRank { k: usize, reason: String },

    #[error("epsilon {0} outside the admissible range")]
    InvalidEpsilon(f64),

    #[error("infeasible row-norm targets: {0}")]
    InfeasibleTargets(String),

    #[error("basis already spans the whole space; complement is empty")]
    EmptyComplement,

    #[error("infeasible profile request: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
