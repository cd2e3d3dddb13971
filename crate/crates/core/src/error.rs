use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The direct gain of a user is (numerically) zero, so no finite power serves it.
    #[error("degenerate channel for user {user}")]
    DegenerateChannel { user: usize },

    #[error("phase recovery produced a zero vector for user {user}")]
    DegenerateRecovery { user: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
