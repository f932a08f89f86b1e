use thiserror::Error;

/// Errors raised by the solver and its building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed expression string.
    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },

    /// A parameter lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Problem data violates one of the standing hypotheses.
    #[error("hypothesis violated ({hypothesis}): {detail}")]
    Hypothesis { hypothesis: &'static str, detail: String },

    /// Degenerate or non-conforming geometry.
    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Zero pivot during factorization.
    #[error("singular matrix: zero pivot in column {column}")]
    Singular { column: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error(
        "Newton did not converge at t = {time} after {iterations} iterations (residual {residual:e})"
    )]
    NewtonDiverged {
        time: f64,
        iterations: usize,
        residual: f64,
    },

    /// Initial datum or source produced a non-finite value.
    #[error("input error: {0}")]
    Input(String),

    /// Configuration file problems.
    #[error("config error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
