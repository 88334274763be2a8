use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bracket error: {0}")]
    Bracket(String),
    #[error("index {index} out of range (available: {len})")]
    Index { index: usize, len: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("certification failed at step {step}: {reason}")]
    Certification { step: usize, reason: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("bisection exceeded {0} steps")]
    StepLimit(usize),
    #[error("level {level} needs exponent beyond representable range")]
    Unrepresentable { level: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
