use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FpaError {
    #[error("word of length {len} exceeds truncation degree {maxdeg}")]
    DegreeExceeded { len: usize, maxdeg: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("inadmissible pair: {0}")]
    Inadmissible(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("component {component} has zero constant term")]
    ZeroConstantTerm { component: usize },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, FpaError>;
