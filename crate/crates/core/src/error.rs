use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An ensemble description that cannot be realised.
    #[error("infeasible ensemble: {0}")]
    Infeasible(String),
    #[error("graph sampling failed after {attempts} attempts")]
    SamplingFailure { attempts: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("arity {got} is not supported here (expected {expected})")]
    UnsupportedArity { got: usize, expected: String },
    #[error("source violates a parity constraint at check {check}")]
    ConstraintViolation { check: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// Two certain messages disagree at a variable or a check.
    #[error("contradictory certain messages at variable {var}")]
    Contradiction { var: usize },
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    #[error("surrogate or quantity mismatch: {0}")]
    Mismatch(String),
    #[error("numerical procedure did not converge: {0}")]
    NonConvergence(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {x} is outside [0, 1]")))
    }
}
