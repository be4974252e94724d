use thiserror::Error;

/// Errors raised by the arithmetic and dynamics layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree error: {0}")]
    Degree(String),
    #[error("zero polynomial is not allowed here: {0}")]
    ZeroPoly(&'static str),
    #[error("cap exceeded: {name} (limit {limit}, requested {requested})")]
    Cap {
        name: &'static str,
        limit: usize,
        requested: usize,
    },
    #[error("bad reduction at {0}")]
    BadReduction(String),
    #[error("point reduces to infinity: {0}")]
    AtInfinity(String),
    #[error("point is preperiodic: {0}")]
    Preperiodic(String),
    #[error("precision cap reached after {steps} steps (partial estimate {partial})")]
    Precision { steps: usize, partial: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not irreducible: {0}")]
    Reducible(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
