use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("not a density operator: {0}")]
    InvalidState(String),

    #[error("not a channel: {reason} (residual {residual:.3e})")]
    InvalidChannel { reason: String, residual: f64 },

    #[error("not a probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("problem size {requested} exceeds budget {budget}")]
    Budget { requested: usize, budget: usize },

    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    #[error("optimization problem is infeasible: {0}")]
    Infeasible(String),

    #[error("optimization problem is unbounded")]
    Unbounded,

    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
