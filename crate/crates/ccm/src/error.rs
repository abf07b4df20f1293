use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CcmError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("point {0} is not in the upper half-plane")]
    NotUpper(String),
    #[error("resolvent system too ill-conditioned (bound {bound:.3e}); use a larger Im z or more modes")]
    IllConditioned { bound: f64 },
    #[error("linear algebra failure: {0}")]
    LinAlg(String),
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
}

pub type Result<T> = std::result::Result<T, CcmError>;
