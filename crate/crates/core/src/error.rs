use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {requested} exceeds the cap of {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigenvalue {value:.3e} is below the clipping threshold")]
    NegativeEigenvalue { value: f64 },

    #[error("spectrum sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("{what} = {value} is out of range (max {max})")]
    OutOfRange { what: &'static str, value: usize, max: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical routine failed: {0}")]
    Convergence(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}
