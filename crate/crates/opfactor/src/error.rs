//! Error type shared by every module in the crate.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, OpfactorError>;

#[derive(Debug, Clone, Error)]
pub enum OpfactorError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("expected {rows}x{cols} = {expected} entries, got {found}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension mismatch in {context}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("{operand} is not Hermitian positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotHermitianPsd {
        operand: &'static str,
        min_eig: f64,
    },

    #[error("factor is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },

    /// Carries the witness vector exhibiting why no factor exists.
    #[error("instance is infeasible: {reason}")]
    Infeasible {
        reason: String,
        witness: Option<Vec<Complex64>>,
    },

    #[error("range of T is not contained in range of B (worst column {column}, residual {residual:.3e})")]
    RangeNotIncluded {
        column: usize,
        residual: f64,
        witness: Vec<Complex64>,
    },

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),

    #[error("tolerance out of range: {0}")]
    InvalidTolerance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("certificate schema error: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for OpfactorError {
    fn from(e: std::io::Error) -> Self {
        OpfactorError::Io(e.to_string())
    }
}
