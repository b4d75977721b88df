use thiserror::Error;

/// Errors surfaced by the core library.
///
/// Exact-arithmetic guards are deliberately loud: a failed divisibility
/// check means a counting identity was violated, which is a bug (or a
/// degenerate parameter set) and never something to paper over.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("exact division failed in {context}: {dividend} is not divisible by {divisor}")]
    InexactDivision {
        context: &'static str,
        dividend: String,
        divisor: String,
    },

    #[error("closed form for the cycle automorphism count failed validation at n={n}: brute force {brute}, closed form {closed}")]
    ClosedFormMismatch { n: usize, brute: String, closed: String },

    #[error("numerical routine failed: {0}")]
    Numeric(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
