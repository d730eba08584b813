use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("problem is infeasible")]
    Infeasible,
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("unknown inequality `{0}`")]
    UnknownInequality(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
